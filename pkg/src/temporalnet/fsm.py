"""Pulse-mode asynchronous state machines with gamma-cycle reset.

Time advances in unit steps inside each gamma cycle (``0..k-1``).  At every
step a gate sees one input pattern: one symbol per data line plus the reset
line.  Data symbols are ``-`` (no spike), ``t`` (spike now) or ``0`` (spike
coincident with the reset at time 0); the reset symbol is ``0`` or ``-``.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

from .core import (ENUMERATION_CAP, INF, CheckResult, OpKind, TValue,
                   apply_binary, check_cap, delay_finite, domain)

Y0, Y1, E = "Y0", "Y1", "E"


class Spike(NamedTuple):
    cycle: int
    line: str
    time: int


class Violation(NamedTuple):
    gate: str
    cycle: int
    time: int

    def __str__(self) -> str:
        return f"E: gate {self.gate} cycle {self.cycle} time {self.time}"


class MalformedTrace(ValueError):
    pass


@dataclass(frozen=True)
class FsmSpec:
    """Transition table ``(state, pattern) -> (next state, action)``.

    Actions: ``-`` none, ``t`` emit now, ``t+1`` emit one step after the
    stored trigger time, ``0`` emit at time 0, ``E`` violation.
    """

    name: str
    lines: tuple[str, ...]
    rows: Mapping[tuple[str, str], tuple[str, str]]
    initial: str = Y0

    def patterns(self) -> list[str]:
        return sorted({p for _, p in self.rows})

    def table(self) -> str:
        """Human-readable table with τ for trigger times."""
        head = "".join(l[0] for l in self.lines) + "r"
        out = [f"state  in({head})  next  out"]
        for (s, p), (n, a) in self.rows.items():
            out.append(f"{s:<6} {p.replace('t', 'τ'):<{len(head) + 5}} {n:<5} "
                       f"{a.replace('t', 'τ')}")
        return "\n".join(out)


def _rows(text: str) -> dict[tuple[str, str], tuple[str, str]]:
    rows = {}
    for line in text.strip().splitlines():
        s, p, n, a = line.split()
        rows[(s, p)] = (n, a)
    return rows


_DELAY = _rows("""
Y0 --  Y0 -
Y0 t-  Y1 -
Y0 00  Y1 -
Y0 -0  Y0 -
Y1 --  Y0 t+1
Y1 t-  E  E
Y1 00  Y1 -
Y1 -0  Y0 -
""")

_MIN = _rows("""
Y0 ---  Y0 -
Y0 t--  Y1 t
Y0 -t-  Y1 t
Y0 tt-  Y0 t
Y0 --0  Y0 -
Y0 -00  Y1 0
Y0 0-0  Y1 0
Y0 000  Y0 0
Y1 ---  Y1 -
Y1 t--  Y0 -
Y1 -t-  Y0 -
Y1 tt-  E  E
Y1 --0  Y0 -
Y1 -00  Y1 0
Y1 0-0  Y1 0
Y1 000  Y0 0
""")

# min variant with lossy reset rows: the reset rows out of Y1 drop the output of a spike that arrives together with the reset
_MIN_LOSSY = {**_MIN, **_rows("""
Y1 -00  Y0 -
Y1 0-0  Y0 -
Y1 000  Y0 t
""")}

_MAX = _rows("""
Y0 ---  Y0 -
Y0 t--  Y1 -
Y0 -t-  Y1 -
Y0 tt-  Y0 t
Y0 --0  Y0 -
Y0 -00  Y1 -
Y0 0-0  Y1 -
Y0 000  Y0 0
Y1 ---  Y1 -
Y1 t--  Y0 t
Y1 -t-  Y0 t
Y1 tt-  E  E
Y1 --0  Y0 -
Y1 -00  Y1 -
Y1 0-0  Y1 -
Y1 000  Y0 0
""")


def builtin_fsm(kind: str | OpKind, lossy_reset: bool = False) -> FsmSpec:
    """Transition table for ``delay``, ``min`` or ``max``.

    ``lossy_reset=True`` returns a min variant whose three reset rows out of Y1 lose the output of a spike
    that coincides with the reset, so it only matches the ideal operator
    when every cycle starts in Y0.  The default table handles those rows
    the way the max table does: reset first, then the coincident spike.
    """
    kind = kind.value if isinstance(kind, OpKind) else kind
    if kind == "delay":
        return FsmSpec("delay", ("a",), _DELAY)
    if kind == "min":
        return FsmSpec("min", ("a", "b"), _MIN_LOSSY if lossy_reset else _MIN)
    if kind == "max":
        return FsmSpec("max", ("a", "b"), _MAX)
    raise ValueError(f"no pulse-mode table for {kind!r}")


def pattern(spikes: Sequence[bool], reset: bool) -> str:
    data = "".join(("0" if reset else "t") if s else "-" for s in spikes)
    return data + ("0" if reset else "-")


class GateModel:
    """Common interface: one call per time step."""

    lines: tuple[str, ...] = ()

    def reset_state(self) -> None:
        pass

    def step(self, t: int, spikes: Sequence[bool], reset: bool) -> tuple[list[int], bool]:
        """Return ``(output times, violated)`` for the inputs seen at ``t``."""
        raise NotImplementedError

    def rebase(self, offset: int) -> None:
        """Shift stored times when a new window starts without a reset."""


class TableGate(GateModel):
    def __init__(self, spec: FsmSpec):
        self.spec = spec
        self.lines = spec.lines
        self.state = spec.initial
        self.tau: int | None = None

    def reset_state(self) -> None:
        self.state = self.spec.initial
        self.tau = None

    def rebase(self, offset: int) -> None:
        if self.tau is not None:
            self.tau -= offset

    def step(self, t, spikes, reset):
        nxt, action = self.spec.rows[(self.state, pattern(spikes, reset))]
        if action == "E":
            # a line spiked twice in one cycle; the state is left as it was
            return [], True
        out = []
        if action == "t":
            out.append(t)
        elif action == "0":
            out.append(0 if reset else t)
        elif action == "t+1":
            out.append(self.tau + 1)
        if any(spikes):
            self.tau = t
        self.state = nxt
        return out, False


class DelayGate(GateModel):
    """``c`` pulse-mode unit delays in series."""

    lines = ("a",)

    def __init__(self, c: int = 1, horizon: int | None = None):
        self.stages = [TableGate(builtin_fsm("delay")) for _ in range(c)]
        self.horizon = horizon

    def reset_state(self):
        for s in self.stages:
            s.reset_state()

    def rebase(self, offset):
        for s in self.stages:
            s.rebase(offset)

    def step(self, t, spikes, reset):
        fire = spikes[0]
        bad = False
        for s in self.stages:
            out, v = s.step(t, (fire,), reset)
            bad |= v
            fire = bool(out) and (self.horizon is None or out[0] < self.horizon)
        return ([t] if fire else []), bad


class BehavioralGate(GateModel):
    """Any 2-ary operator, modeled from the arrival times seen so far.

    Inputs that have not arrived yet are treated as ``INF``; causality makes
    the output at time ``t`` independent of later arrivals.
    """

    lines = ("a", "b")

    def __init__(self, op: OpKind):
        self.op = op
        self.arrived: list[TValue] = [INF, INF]
        self.fired = False

    def reset_state(self):
        self.arrived = [INF, INF]
        self.fired = False

    def rebase(self, offset):
        self.arrived = [a - offset if a != INF else a for a in self.arrived]

    def step(self, t, spikes, reset):
        if reset:
            self.reset_state()
        bad = False
        for j, s in enumerate(spikes):
            if s:
                bad |= self.arrived[j] != INF
                self.arrived[j] = t
        if self.fired or not any(spikes):
            return [], bad
        if apply_binary(self.op, *self.arrived) == t:
            self.fired = True
            return [t], bad
        return [], bad


class IdentityGate(GateModel):
    lines = ("a",)

    def step(self, t, spikes, reset):
        return ([t] if spikes[0] else []), False


class NextCycleGate(GateModel):
    """Carries a delay-chain tap into the next gamma cycle."""

    lines = ("a",)

    def __init__(self, k: int):
        self.k = k

    def step(self, t, spikes, reset):
        return ([t + self.k] if spikes[0] else []), False


def gate_model(op: OpKind | str, c: int = 1, k: int = 4, use_tables: bool = True,
               lossy_reset: bool = False) -> GateModel:
    """Pulse-mode model for a netlist gate.

    Delay, min and max use their transition tables (behavioral models when
    ``use_tables`` is False); the remaining relational and exclusive
    operators always use :class:`BehavioralGate`.
    """
    if op is OpKind.DELAY:
        return DelayGate(c, horizon=k)
    if op is OpKind.IDENTITY:
        return IdentityGate()
    if op == "next":
        return NextCycleGate(k)
    if op in (OpKind.MIN, OpKind.MAX) and use_tables:
        return TableGate(builtin_fsm(op, lossy_reset=lossy_reset))
    if isinstance(op, OpKind):
        return BehavioralGate(op)
    raise ValueError(f"no pulse-mode model for block {op!r}")


@dataclass
class FsmRun:
    outputs: list[Spike] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)
    end_states: list[str] = field(default_factory=list)

    def values(self, n_cycles: int, line: str = "y") -> list[TValue]:
        """First output spike time per cycle, ``INF`` for silent cycles."""
        vals: list[TValue] = [INF] * n_cycles
        for s in self.outputs:
            if s.line == line and vals[s.cycle] == INF:
                vals[s.cycle] = s.time
        return vals


def _check_trace(trace: Iterable[Spike], k: int, lines: Sequence[str]) -> list[Spike]:
    trace = sorted(trace)
    for s in trace:
        if not 0 <= s.time < k:
            raise MalformedTrace(f"spike {s.line}@{s.time} in cycle {s.cycle} outside 0..{k - 1}")
        if s.cycle < 0:
            raise MalformedTrace(f"negative cycle {s.cycle}")
        if s.line not in lines:
            raise MalformedTrace(f"unknown line {s.line!r}")
    return trace


def run_fsm(fsm: FsmSpec | GateModel, trace: Iterable[Spike], k: int, n_cycles: int,
            reset: bool = True, gate: str = "g0") -> FsmRun:
    """Drive one machine through ``n_cycles`` gamma cycles.

    The reset line spikes at time 0 of every cycle unless ``reset`` is
    False.  A trigger scheduled past the end of a cycle is cancelled by the
    next reset.  Second spikes on a line within a cycle, and table E rows,
    are reported as violations.
    """
    model = TableGate(fsm) if isinstance(fsm, FsmSpec) else fsm
    lines = model.lines
    trace = _check_trace(trace, k, lines)
    at: dict[tuple[int, int], set[str]] = {}
    for s in trace:
        at.setdefault((s.cycle, s.time), set()).add(s.line)
    run = FsmRun()
    seen: set[tuple[int, str]] = set()
    for cyc in range(n_cycles):
        if cyc and not reset:
            model.rebase(k)
        for t in range(k):
            here = at.get((cyc, t), set())
            spikes = tuple(l in here for l in lines)
            outs, bad = model.step(t, spikes, reset and t == 0)
            dup = False
            for l in here:
                dup |= (cyc, l) in seen
                seen.add((cyc, l))
            if bad or dup:
                run.violations.append(Violation(gate, cyc, t))
            for o in outs:
                if o < k:
                    run.outputs.append(Spike(cyc, "y", o))
        run.end_states.append(getattr(model, "state", ""))
    return run


def values_to_trace(rows: Sequence[Sequence[TValue]], lines: Sequence[str]) -> list[Spike]:
    """One tuple of values per cycle; ``INF`` means the line stays silent."""
    return [Spike(c, l, v) for c, vs in enumerate(rows) for l, v in zip(lines, vs) if v != INF]


def _ideal(op: OpKind, k: int):
    if op is OpKind.DELAY:
        return lambda a: delay_finite(a, 1, k)
    if op is OpKind.IDENTITY:
        return lambda a: a
    return lambda a, b: apply_binary(op, a, b)


def _make(fsm):
    if isinstance(fsm, FsmSpec):
        return lambda: TableGate(fsm)
    if isinstance(fsm, OpKind):
        return lambda: BehavioralGate(fsm)
    return fsm


def check_equivalence(fsm: FsmSpec | OpKind, ideal: OpKind, k: int, n_cycles: int = 1,
                      samples: int = 10_000, seed: int = 0, reset: bool = True,
                      sequences: Iterable[Sequence[Sequence[TValue]]] | None = None,
                      cap: int = ENUMERATION_CAP) -> CheckResult:
    """Compare a pulse-mode machine with its ideal operator cycle by cycle.

    One cycle is checked exhaustively over S_k^arity.  Longer runs use
    ``samples`` random sequences, unless explicit ``sequences`` are given.
    The counterexample is the offending sequence of per-cycle input tuples.
    """
    make = _make(fsm)
    arity = len(make().lines)
    f = _ideal(ideal, k)
    if ideal.arity != arity:
        raise ValueError(f"machine has {arity} inputs, {ideal.value} takes {ideal.arity}")
    if sequences is None:
        if n_cycles == 1:
            check_cap(k, arity, cap)
            sequences = ([xs] for xs in itertools.product(domain(k), repeat=arity))
        else:
            rng = random.Random(seed)
            dom = domain(k)
            sequences = ([tuple(rng.choice(dom) for _ in range(arity)) for _ in range(n_cycles)]
                         for _ in range(samples))
    n = 0
    lines = make().lines
    for seq in sequences:
        seq = [tuple(xs) for xs in seq]
        n += 1
        run = run_fsm(make(), values_to_trace(seq, lines), k, len(seq), reset=reset)
        want = [f(*xs) for xs in seq]
        counts = [sum(1 for s in run.outputs if s.cycle == c) for c in range(len(seq))]
        got = run.values(len(seq))
        if got != want or run.violations or any(c > 1 for c in counts):
            return CheckResult(False, tuple(seq),
                               f"inputs {seq}: machine gave {got}, operator gives {want}", n)
    return CheckResult(True, checked=n)


def format_trace(trace: Iterable[Spike]) -> str:
    """``cycle <n>: <line>@<t>, ...`` with one line per cycle that has spikes."""
    by_cycle: dict[int, list[Spike]] = {}
    for s in sorted(trace):
        by_cycle.setdefault(s.cycle, []).append(s)
    lines = []
    for c in sorted(by_cycle):
        items = sorted(by_cycle[c], key=lambda s: (s.time, s.line))
        lines.append(f"cycle {c}: " + ", ".join(f"{s.line}@{s.time}" for s in items))
    return "\n".join(lines) + ("\n" if lines else "")


_CYCLE = re.compile(r"^cycle\s+(\d+)\s*:(.*)$")
_EVENT = re.compile(r"^([A-Za-z_][\w.]*)@(\d+)$")


def parse_trace(text: str) -> list[Spike]:
    spikes = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _CYCLE.match(line)
        if m is None:
            raise MalformedTrace(f"line {lineno}: expected 'cycle <n>: <line>@<t>, ...'")
        cyc = int(m.group(1))
        for item in m.group(2).split(","):
            item = item.strip()
            if not item:
                continue
            e = _EVENT.match(item)
            if e is None:
                raise MalformedTrace(f"line {lineno}: bad event {item!r}")
            spikes.append(Spike(cyc, e.group(1), int(e.group(2))))
    return sorted(spikes)


def format_violations(violations: Iterable[Violation]) -> str:
    return "".join(f"{v}\n" for v in violations)


def parse_violation(line: str) -> Violation:
    m = re.fullmatch(r"E: gate (\S+) cycle (\d+) time (\d+)", line.strip())
    if m is None:
        raise ValueError(f"not a violation record: {line!r}")
    return Violation(m.group(1), int(m.group(2)), int(m.group(3)))
