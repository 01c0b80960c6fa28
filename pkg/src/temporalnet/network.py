"""Feedforward gate netlists: construction, evaluation and axiom checking."""

from __future__ import annotations

import graphlib
import itertools
import random
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping, Sequence

from .core import (ENUMERATION_CAP, INF, CheckResult, OpKind, TValue,
                   apply_binary, check_cap, delay, domain, format_value, shift)
from .expr import Const, Delay, Expr, Var, constants, variables

Volley = dict  # line name -> TValue


@dataclass(frozen=True)
class Block:
    """A gate type beyond the ten 2-ary operators and delay: ``fn(values, k, saturate) -> value``."""

    name: str
    arity: int
    fn: Callable[[Sequence[TValue], int, bool], TValue]


def _next_cycle(vs, k, saturate):
    # the same tap one gamma period later; never saturates by construction
    return vs[0] + k


def _decrement(vs, k, saturate):
    # negative control: moves a spike backwards in time
    a = vs[0]
    return a - 1 if 0 < a < INF else a


BLOCKS: dict[str, Block] = {
    "next": Block("next", 1, _next_cycle),
    "dec": Block("dec", 1, _decrement),
}


def register_block(block: Block) -> None:
    """Make a custom block usable in netlists and netlist files."""
    BLOCKS[block.name] = block


@dataclass(frozen=True)
class Gate:
    out: str
    op: OpKind | str
    ins: tuple[str, ...]
    c: int = 1  # delay amount, DELAY only

    @property
    def arity(self) -> int:
        if isinstance(self.op, OpKind):
            return self.op.arity
        return BLOCKS[self.op].arity

    @property
    def opname(self) -> str:
        if self.op is OpKind.DELAY:
            return f"delay{self.c}"
        return self.op.value if isinstance(self.op, OpKind) else self.op


class NetlistError(ValueError):
    def __init__(self, diagnostics: list[str]):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = diagnostics


class UnboundInput(KeyError):
    pass


@dataclass(frozen=True)
class Netlist:
    """A DAG of gates with named primary inputs and outputs.

    ``outputs`` maps each output line to the wire that drives it.  ``ref``
    names the gamma reference input when the netlist uses delay-chain taps.
    """

    k: int
    inputs: tuple[str, ...]
    outputs: Mapping[str, str]
    gates: tuple[Gate, ...]
    ref: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "outputs", dict(self.outputs))

    def __hash__(self):
        return id(self)

    @cached_property
    def drivers(self) -> dict[str, Gate]:
        return {g.out: g for g in self.gates}

    @cached_property
    def order(self) -> tuple[Gate, ...]:
        diags = validate(self)
        if diags:
            raise NetlistError(diags)
        ts = graphlib.TopologicalSorter()
        for g in self.gates:
            ts.add(g.out, *[w for w in g.ins if w in self.drivers])
        return tuple(self.drivers[w] for w in ts.static_order() if w in self.drivers)

    @cached_property
    def clock_wires(self) -> frozenset[str]:
        """Reference input, its delay-chain taps and next-cycle caps."""
        if self.ref is None:
            return frozenset()
        clock = {self.ref}
        for g in self.order:
            if g.ins and all(w in clock for w in g.ins) and (
                    g.op is OpKind.DELAY or g.op == "next"):
                clock.add(g.out)
        return frozenset(clock)

    @property
    def logic_gates(self) -> list[Gate]:
        return [g for g in self.gates if g.out not in self.clock_wires]

    @property
    def has_caps(self) -> bool:
        return any(g.op == "next" for g in self.gates)

    def evaluator(self, saturate: bool = True) -> Callable[[Sequence[TValue]], tuple]:
        """Compile to a function of input values (in ``inputs`` order)."""
        steps = []
        for g in self.order:
            if isinstance(g.op, OpKind):
                steps.append((g.out, g.op, g.ins, g.c, None))
            else:
                steps.append((g.out, None, g.ins, 0, BLOCKS[g.op].fn))
        k = self.k
        dk = k if saturate else None
        names, outs = self.inputs, list(self.outputs.values())

        def run(values):
            w = dict(zip(names, values))
            for out, op, ins, c, fn in steps:
                if fn is not None:
                    w[out] = fn([w[i] for i in ins], k, saturate)
                elif op is OpKind.DELAY:
                    w[out] = delay(w[ins[0]], c, dk)
                elif op is OpKind.IDENTITY:
                    w[out] = w[ins[0]]
                else:
                    w[out] = apply_binary(op, w[ins[0]], w[ins[1]])
            return tuple(w[o] for o in outs)
        return run

    def to_text(self) -> str:
        lines = [f"k={self.k}", f"inputs: {','.join(self.inputs)}"]
        outs = [name if wire == name else f"{name}={wire}"
                for name, wire in self.outputs.items()]
        lines.append(f"outputs: {','.join(outs)}")
        if self.ref is not None:
            lines.append(f"ref: {self.ref}")
        for g in self.gates:
            lines.append(f"{g.out} = {g.opname}({','.join(g.ins)})")
        return "\n".join(lines) + "\n"


def validate(netlist: Netlist) -> list[str]:
    """Structural diagnostics; an empty list means the netlist is sound."""
    diags = []
    if netlist.k < 2:
        diags.append(f"k must be at least 2, got {netlist.k}")
    defined = set()
    for name in netlist.inputs:
        if name in defined:
            diags.append(f"duplicate input {name!r}")
        defined.add(name)
    if netlist.ref is not None and netlist.ref not in netlist.inputs:
        diags.append(f"reference {netlist.ref!r} is not a primary input")
    for g in netlist.gates:
        if g.out in defined:
            diags.append(f"wire {g.out!r} is driven more than once")
        defined.add(g.out)
    for g in netlist.gates:
        if not isinstance(g.op, OpKind) and g.op not in BLOCKS:
            diags.append(f"gate {g.out!r}: unknown op {g.op!r}")
            continue
        if len(g.ins) != g.arity:
            diags.append(f"gate {g.out!r}: {g.opname} takes {g.arity} input(s), got {len(g.ins)}")
        if g.op is OpKind.DELAY and g.c < 1:
            diags.append(f"gate {g.out!r}: delay amount must be positive")
        for w in g.ins:
            if w not in defined:
                diags.append(f"gate {g.out!r}: input {w!r} is not driven")
    for name, wire in netlist.outputs.items():
        if wire not in defined:
            diags.append(f"output {name!r}: wire {wire!r} is not driven")
    ts = graphlib.TopologicalSorter()
    for g in netlist.gates:
        ts.add(g.out, *g.ins)
    try:
        ts.prepare()
    except graphlib.CycleError as err:
        diags.append(f"cycle through {' -> '.join(err.args[1])}")
    return diags


def evaluate(netlist: Netlist, volley: Mapping[str, TValue], saturate: bool = True) -> Volley:
    """Zero-delay evaluation; only delay gates move spikes in time."""
    missing = [n for n in netlist.inputs if n not in volley]
    if missing:
        raise UnboundInput(", ".join(missing))
    values = netlist.evaluator(saturate)([volley[n] for n in netlist.inputs])
    return dict(zip(netlist.outputs, values))


def check_st_axioms(netlist: Netlist, algebra: str = "auto",
                    cap: int = ENUMERATION_CAP, max_failures: int = 10) -> CheckResult:
    """Exhaustively check causality (both clauses) and invariance.

    ``algebra="finite"`` uses the S_k invariance rule with saturating delays
    and shifts; ``"unbounded"`` uses plain ``+1`` shifts.  ``"auto"`` picks
    unbounded for netlists whose outputs reach into the next gamma cycle.
    Failures are ``(clause, inputs, output line, detail)`` tuples.
    """
    if algebra == "auto":
        algebra = "unbounded" if netlist.has_caps else "finite"
    if algebra not in ("finite", "unbounded"):
        raise ValueError(f"unknown algebra {algebra!r}")
    finite = algebra == "finite"
    k = netlist.k
    q = len(netlist.inputs)
    check_cap(k, q, cap)
    run = netlist.evaluator(saturate=finite)
    sk = k if finite else None
    failures = []
    n = 0

    def fail(*item):
        failures.append(item)
        return len(failures) >= max_failures

    for xs in itertools.product(domain(k), repeat=q):
        n += 1
        zs = run(xs)
        shifted = run(tuple(shift(x, sk) for x in xs))
        lo = min(xs) if xs else INF
        stop = False
        for line, z, zs1 in zip(netlist.outputs, zs, shifted):
            if z != INF and z < lo:
                stop |= fail("causality-ii", xs, line, f"output {z} precedes every input")
            for j, x in enumerate(xs):
                if x > z:
                    alt = run(xs[:j] + (INF,) + xs[j + 1:])
                    if alt[list(netlist.outputs).index(line)] != z:
                        stop |= fail("causality-i", xs, line,
                                     f"input {netlist.inputs[j]}={format_value(x)} after output "
                                     f"{format_value(z)} changes it")
            if finite:
                want = z + 1 if z + 1 < k else INF
            else:
                want = z + 1
            if zs1 != want:
                stop |= fail("invariance", xs, line,
                             f"shifted output {format_value(zs1)}, expected {format_value(want)}")
        if stop:
            break
    if failures:
        clause, xs, line, detail = failures[0]
        return CheckResult(False, xs, f"{clause} on {line}: {detail}", n, failures)
    return CheckResult(True, checked=n)


def expr_to_netlist(exprs: Mapping[str, Expr], k: int, ref: str = "R") -> Netlist:
    """Lower named expressions onto one netlist.

    Constants become taps on a single gamma delay chain of ``k-1`` unit
    delays fed by the reference input; a constant ``n >= k`` is the tap
    ``n-k`` of the next gamma cycle.  Identical subexpressions share a gate.
    """
    used_consts = set()
    names = set()
    for e in exprs.values():
        used_consts |= constants(e)
        names |= variables(e)
    bad = [n for n in used_consts if not 0 <= n <= 2 * k - 1]
    if bad:
        raise ValueError(f"constants {sorted(bad)} outside 0..{2 * k - 1}")
    if used_consts and ref in names:
        raise ValueError(f"variable name {ref!r} collides with the reference input")
    inputs = ([ref] if used_consts else []) + sorted(names)
    gates: list[Gate] = []
    wires: dict[Expr, str] = {}
    counter = itertools.count(1)

    def tap(n: int) -> str:
        if n == 0:
            return ref
        return f"_g{n}"

    if used_consts:
        for n in range(1, k):
            gates.append(Gate(tap(n), OpKind.DELAY, (tap(n - 1),), 1))

    def build(e: Expr) -> str:
        if isinstance(e, Var):
            return e.name
        if e in wires:
            return wires[e]
        if isinstance(e, Const):
            if e.n < k:
                return tap(e.n)
            out = f"_n{e.n}"
            gates.append(Gate(out, "next", (tap(e.n - k),)))
        elif isinstance(e, Delay):
            src = build(e.child)
            out = f"_d{next(counter)}"
            gates.append(Gate(out, OpKind.DELAY, (src,), e.c))
        else:
            a, b = build(e.left), build(e.right)
            out = f"_t{next(counter)}"
            gates.append(Gate(out, e.op, (a, b)))
        wires[e] = out
        return out

    roots = {name: build(e) for name, e in exprs.items()}
    # give each output's root gate the output's own name where possible
    taken = set(inputs) | {g.out for g in gates}
    rename = {}
    for name, wire in roots.items():
        if wire.startswith("_t") or wire.startswith("_d"):
            if wire not in rename and name not in taken:
                rename[wire] = name
                taken.add(name)
    gates = [Gate(rename.get(g.out, g.out), g.op,
                  tuple(rename.get(w, w) for w in g.ins), g.c) for g in gates]
    outputs = {name: rename.get(w, w) for name, w in roots.items()}
    return Netlist(k, inputs, outputs, gates, ref if used_consts else None)


_GATE_LINE = re.compile(r"^\s*([A-Za-z_][\w]*)\s*=\s*([A-Za-z_]\w*)\s*\(([^)]*)\)\s*$")
_OPS_BY_NAME = {op.value: op for op in OpKind if op is not OpKind.DELAY}


def parse_netlist(text: str) -> Netlist:
    """Read the line-oriented netlist format (see :meth:`Netlist.to_text`)."""
    k = None
    inputs: list[str] = []
    outputs: dict[str, str] = {}
    gates = []
    ref = None
    errors = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("k="):
            k = int(line[2:])
        elif line.startswith("inputs:"):
            inputs = [s.strip() for s in line[7:].split(",") if s.strip()]
        elif line.startswith("outputs:"):
            for item in line[8:].split(","):
                item = item.strip()
                if item:
                    name, _, wire = item.partition("=")
                    outputs[name.strip()] = (wire or name).strip()
        elif line.startswith("ref:"):
            ref = line[4:].strip()
        else:
            m = _GATE_LINE.match(line)
            if m is None:
                errors.append(f"line {lineno}: cannot parse {raw.strip()!r}")
                continue
            out, opname, args = m.groups()
            ins = tuple(a.strip() for a in args.split(",") if a.strip())
            d = re.fullmatch(r"delay(\d+)", opname)
            if d:
                gates.append(Gate(out, OpKind.DELAY, ins, int(d.group(1))))
            elif opname in _OPS_BY_NAME:
                gates.append(Gate(out, _OPS_BY_NAME[opname], ins))
            elif opname in BLOCKS:
                gates.append(Gate(out, opname, ins))
            else:
                errors.append(f"line {lineno}: unknown op {opname!r}")
    if k is None:
        errors.append("missing 'k=<int>' header")
    if errors:
        raise NetlistError(errors)
    net = Netlist(k, inputs, outputs, gates, ref)
    diags = validate(net)
    if diags:
        raise NetlistError(diags)
    return net


def random_netlist(rng: random.Random, k: int = 4, n_inputs: int = 3, n_gates: int = 12,
                   ops: Sequence[OpKind] = (OpKind.MIN, OpKind.MAX, OpKind.LT, OpKind.LE,
                                            OpKind.EQ, OpKind.DELAY),
                   n_outputs: int | None = None, max_delays_per_path: int | None = None,
                   input_names: Sequence[str] | None = None) -> Netlist:
    """A random feedforward netlist; each gate reads earlier wires only."""
    inputs = list(input_names) if input_names else [f"x{i}" for i in range(n_inputs)]
    wires = list(inputs)
    depth = {w: 0 for w in inputs}
    gates = []
    for i in range(n_gates):
        out = f"g{i}"
        op = rng.choice(list(ops))
        if op is OpKind.DELAY:
            choices = wires if max_delays_per_path is None else [
                w for w in wires if depth[w] < max_delays_per_path]
            if not choices:
                op = OpKind.MIN
            else:
                src = rng.choice(choices)
                gates.append(Gate(out, op, (src,), rng.randint(1, 2)))
                depth[out] = depth[src] + 1
                wires.append(out)
                continue
        if op is OpKind.IDENTITY:
            src = rng.choice(wires)
            gates.append(Gate(out, op, (src,)))
            depth[out] = depth[src]
        else:
            a, b = rng.choice(wires), rng.choice(wires)
            gates.append(Gate(out, op, (a, b)))
            depth[out] = max(depth[a], depth[b])
        wires.append(out)
    n_outputs = n_outputs or rng.randint(1, 3)
    pool = [g.out for g in gates] or inputs
    outs = rng.sample(pool, min(n_outputs, len(pool)))
    return Netlist(k, inputs, {f"y{i}": w for i, w in enumerate(outs)}, gates)
