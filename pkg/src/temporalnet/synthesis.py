"""Compile function tables into standard-form temporal equations.

A table row ``A=a, B=b -> v`` becomes the minterm ``A==a | B==b | v+k``: it
fires at ``v+k`` (the output ``v`` measured from the next gamma reference)
exactly when every input matches.  Rows with the same output value form a
meta implicant (their ``&``), and the function is the ``&`` of all meta
implicants.

Implicants are kept as boxes: one closed interval per constrained input.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .core import INF, TValue, format_value, parse_value
from .expr import (Bin, Const, CostReport, Expr, OpKind, Var, compile_expr,
                   flatten, gate_cost, max_of, min_of)
from .network import Netlist, expr_to_netlist


class TableError(ValueError):
    pass


@dataclass
class FunctionTable:
    """Rows map input tuples in ``0..k-1`` to conventional outputs.

    Outputs are in ``0..k-1`` or ``INF``; :meth:`r_referenced` gives the
    values the synthesized network produces (shifted up by ``k``).
    """

    k: int
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    rows: dict[tuple[int, ...], tuple[TValue, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self.inputs = tuple(self.inputs)
        self.outputs = tuple(self.outputs)
        for xs, ys in self.rows.items():
            self._check_row(xs, ys)

    def _check_row(self, xs, ys):
        if len(xs) != len(self.inputs) or len(ys) != len(self.outputs):
            raise TableError(f"row {xs} -> {ys} has the wrong width")
        if any(not (isinstance(x, int) and 0 <= x < self.k) for x in xs):
            raise TableError(f"row {xs}: inputs must lie in 0..{self.k - 1}")
        if any(not (y == INF or 0 <= y < self.k) for y in ys):
            raise TableError(f"row {xs}: outputs must lie in 0..{self.k - 1} or be inf")

    def add(self, xs: Sequence[int], ys: Sequence[TValue]) -> None:
        xs, ys = tuple(xs), tuple(ys)
        self._check_row(xs, ys)
        if xs in self.rows:
            raise TableError(f"duplicate row for inputs {xs}")
        self.rows[xs] = ys

    @property
    def is_total(self) -> bool:
        return len(self.rows) == self.k ** len(self.inputs)

    def r_referenced(self, xs: Sequence[int]) -> dict[str, TValue]:
        return {name: y + self.k for name, y in zip(self.outputs, self.rows[tuple(xs)])}

    def column(self, name: str) -> dict[tuple[int, ...], TValue]:
        j = self.outputs.index(name)
        return {xs: ys[j] for xs, ys in self.rows.items()}

    def restrict(self, rows: Iterable[Sequence[int]], outputs: Sequence[str] | None = None) -> "FunctionTable":
        outputs = tuple(outputs or self.outputs)
        idx = [self.outputs.index(o) for o in outputs]
        return FunctionTable(self.k, self.inputs, outputs,
                             {tuple(xs): tuple(self.rows[tuple(xs)][i] for i in idx) for xs in rows})

    def to_text(self) -> str:
        lines = [f"k={self.k}", f"inputs: {','.join(self.inputs)}",
                 f"outputs: {','.join(self.outputs)}"]
        for xs in sorted(self.rows):
            ys = self.rows[xs]
            lines.append(f"{' '.join(map(str, xs))} : {' '.join(format_value(y) for y in ys)}")
        return "\n".join(lines) + "\n"


def parse_table(text: str) -> FunctionTable:
    k = None
    inputs: list[str] = []
    outputs: list[str] = []
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("k="):
            k = int(line[2:])
        elif line.startswith("inputs:"):
            inputs = [s.strip() for s in line[7:].split(",") if s.strip()]
        elif line.startswith("outputs:"):
            outputs = [s.strip() for s in line[8:].split(",") if s.strip()]
        else:
            left, sep, right = line.partition(":")
            if not sep:
                raise TableError(f"line {lineno}: expected '<inputs> : <outputs>'")
            try:
                xs = tuple(int(t) for t in left.split())
                ys = tuple(parse_value(t) for t in right.split())
            except ValueError as err:
                raise TableError(f"line {lineno}: {err}") from None
            rows.append((lineno, xs, ys))
    if k is None:
        raise TableError("missing 'k=<int>' header")
    table = FunctionTable(k, inputs, outputs)
    for lineno, xs, ys in rows:
        try:
            table.add(xs, ys)
        except TableError as err:
            raise TableError(f"line {lineno}: {err}") from None
    return table


def adder_table(k: int = 4) -> FunctionTable:
    """The k-ary half adder: ``S = (A+B) mod k``, ``Cout = (A+B) div k``."""
    rows = {(a, b): ((a + b) % k, (a + b) // k) for a in range(k) for b in range(k)}
    return FunctionTable(k, ("A", "B"), ("S", "Cout"), rows)


def random_table(rng: random.Random, k: int, n_inputs: int = 2, n_outputs: int = 1,
                 p_inf: float = 0.1) -> FunctionTable:
    """A random total table; each output is ``inf`` with probability ``p_inf``."""
    names = "ABCDEFGH"[:n_inputs]
    outs = [f"Y{i}" for i in range(n_outputs)]
    rows = {}
    for xs in itertools.product(range(k), repeat=n_inputs):
        rows[xs] = tuple(INF if rng.random() < p_inf else rng.randrange(k) for _ in outs)
    return FunctionTable(k, tuple(names), tuple(outs), rows)


def re_reference(v: TValue, k: int) -> TValue:
    """Value seen by the next segment: measured from the next gamma reference."""
    return v - k if k <= v < 2 * k else INF


@dataclass(frozen=True)
class Implicant:
    """``[constraint terms | extra terms | cap]``.

    ``bounds`` holds ``(var, lo, hi)`` triples sorted by variable; a variable
    absent from ``bounds`` is free.  ``terms`` are further subexpressions
    joined by max.
    """

    bounds: tuple[tuple[str, int, int], ...]
    cap: int
    terms: tuple[Expr, ...] = ()

    def __post_init__(self):
        for var, lo, hi in self.bounds:
            if not 0 <= lo <= hi:
                raise ValueError(f"bad interval ({lo}, {hi}) on {var}")
        object.__setattr__(self, "bounds", tuple(sorted(self.bounds)))

    @classmethod
    def minterm(cls, inputs: Sequence[str], xs: Sequence[int], cap: int) -> "Implicant":
        return cls(tuple((v, x, x) for v, x in zip(inputs, xs)), cap)

    @property
    def vars(self) -> tuple[str, ...]:
        return tuple(v for v, _, _ in self.bounds)

    def interval(self, var: str) -> tuple[int, int] | None:
        for v, lo, hi in self.bounds:
            if v == var:
                return lo, hi
        return None

    def without(self, var: str) -> tuple:
        return tuple(b for b in self.bounds if b[0] != var)

    def with_interval(self, var: str, lo: int, hi: int) -> "Implicant":
        return replace(self, bounds=self.without(var) + ((var, lo, hi),))

    @property
    def is_constant(self) -> bool:
        return not self.bounds and not self.terms

    def contains(self, point: Mapping[str, int]) -> bool:
        return all(lo <= point[v] <= hi for v, lo, hi in self.bounds)

    def to_expr(self, literal: bool = False) -> Expr:
        """Build ``[...] | cap``.

        ``literal=True`` writes every interval as ``(lo <= A) | (A <= hi)``.
        Otherwise single points print as ``A == i`` and a zero lower bound
        is dropped, since ``0 <= A`` is the reference itself.
        """
        parts: list[Expr] = []
        for v, lo, hi in self.bounds:
            var = Var(v)
            if not literal and lo == hi:
                parts.append(Bin(OpKind.EQ, var, Const(lo)))
            elif not literal and lo == 0:
                parts.append(Bin(OpKind.LE, var, Const(hi)))
            else:
                parts += [Bin(OpKind.LE, Const(lo), var), Bin(OpKind.LE, var, Const(hi))]
        parts += list(self.terms)
        parts.append(Const(self.cap))
        return max_of(*parts)

    def __str__(self) -> str:
        return f"[{self.to_expr()}]"


def combine_implicants(p1: Implicant, p2: Implicant) -> Implicant | None:
    """Merge two implicants that differ in one overlapping or adjacent interval.

    Returns None when they cannot be combined: different caps or extra
    terms, different constrained variables, more or fewer than one differing
    interval, or intervals that neither overlap nor adjoin.
    """
    if p1.cap != p2.cap or p1.terms != p2.terms or p1.vars != p2.vars:
        return None
    diff = [(a, b) for a, b in zip(p1.bounds, p2.bounds) if a != b]
    if len(diff) != 1:
        return None
    (var, i, j), (_, n, p) = sorted(diff[0], key=lambda b: (b[1], b[2]))
    if i <= n and n <= j + 1 and j <= p:
        return p1.with_interval(var, i, p)
    return None


def eliminate_full_range(meta: Sequence[Implicant], k: int) -> list[Implicant]:
    """Drop constraints that admit every finite value ``0..k-1``.

    Valid only when the inputs never carry ``INF``.  If an implicant loses
    all its terms the whole meta implicant reduces to its constant cap.
    """
    out = []
    for imp in meta:
        kept = tuple(b for b in imp.bounds if not (b[1] == 0 and b[2] >= k - 1))
        reduced = replace(imp, bounds=kept)
        if reduced.is_constant:
            return [reduced]
        if reduced not in out:
            out.append(reduced)
    return out


@dataclass
class StandardForm:
    """Per output, meta implicants keyed by cap (``k..2k-1``)."""

    k: int
    inputs: tuple[str, ...]
    outputs: dict[str, dict[int, list[Implicant]]]
    finite_inputs: bool = True

    def meta(self, output: str, cap: int) -> list[Implicant]:
        return self.outputs[output].get(cap, [])

    def implicants(self, output: str) -> list[Implicant]:
        return [imp for cap in sorted(self.outputs[output]) for imp in self.outputs[output][cap]]

    def to_exprs(self, literal: bool = False) -> dict[str, Expr | None]:
        """One expression per output; None for an output that never fires."""
        out = {}
        for name in self.outputs:
            terms = [imp.to_expr(literal) for imp in self.implicants(name)]
            out[name] = min_of(*terms) if terms else None
        return out

    def equations(self) -> str:
        lines = []
        for name, e in self.to_exprs().items():
            if e is None:
                lines.append(f"# {name}: no implicants, never fires")
            else:
                lines.append(f"{name} = {e}")
        return "\n".join(lines) + "\n"

    def cost(self) -> CostReport:
        return gate_cost(e for e in self.to_exprs().values() if e is not None)

    def to_netlist(self, ref: str = "R") -> Netlist:
        exprs = self.to_exprs()
        live = {n: e for n, e in exprs.items() if e is not None}
        net = expr_to_netlist(live, self.k, ref)
        if len(live) == len(exprs):
            return net
        # outputs that never fire are driven by a gate that is always INF
        return _with_silent_outputs(net, [n for n, e in exprs.items() if e is None], ref)


def _with_silent_outputs(net: Netlist, names: Sequence[str], ref: str) -> Netlist:
    from .network import Gate

    inputs = list(net.inputs)
    if ref not in inputs:
        inputs.insert(0, ref)
    gates = list(net.gates) + [Gate(n, OpKind.LT, (ref, ref)) for n in names]
    outputs = dict(net.outputs)
    outputs.update({n: n for n in names})
    return Netlist(net.k, inputs, outputs, gates, ref)


def table_to_minterms(table: FunctionTable) -> StandardForm:
    """One minterm per row with a finite output, grouped by cap."""
    outs: dict[str, dict[int, list[Implicant]]] = {o: {} for o in table.outputs}
    for xs in sorted(table.rows):
        for name, y in zip(table.outputs, table.rows[xs]):
            if y == INF:
                continue
            cap = y + table.k
            outs[name].setdefault(cap, []).append(Implicant.minterm(table.inputs, xs, cap))
    outs = {o: dict(sorted(m.items())) for o, m in outs.items()}
    return StandardForm(table.k, table.inputs, outs, finite_inputs=table.is_total)


def eval_form(form: StandardForm, volley: Mapping[str, TValue]) -> dict[str, TValue]:
    """Evaluate every output; results are measured from this cycle's reference."""
    result = {}
    for name, e in form.to_exprs().items():
        result[name] = INF if e is None else compile_expr(e, form.k)(volley)
    return result


def form_function(form: StandardForm):
    """Compiled evaluator ``volley -> {output: value}``."""
    compiled = {n: (None if e is None else compile_expr(e, form.k))
                for n, e in form.to_exprs().items()}
    return lambda volley: {n: INF if f is None else f(volley) for n, f in compiled.items()}


def _combine_on(items: list[tuple[Implicant, bool]], var: str) -> tuple[list, bool]:
    """One sweep merging along ``var``; items are ``(implicant, covers_care)``."""
    groups: dict = {}
    rest = []
    for imp, care in items:
        iv = imp.interval(var)
        if iv is None:
            rest.append((imp, care))
        else:
            groups.setdefault((imp.without(var), imp.terms), []).append((imp, care))
    changed = False
    out = []
    for key in sorted(groups, key=repr):
        members = sorted(groups[key], key=lambda it: (it[0].interval(var), not it[1]))
        cur, cur_care = members[0]
        for imp, care in members[1:]:
            merged = combine_implicants(cur, imp)
            if merged is None:
                out.append((cur, cur_care))
                cur, cur_care = imp, care
            else:
                cur, cur_care = merged, cur_care or care
                changed = True
        out.append((cur, cur_care))
    return out + rest, changed


def minimize_meta(care: Sequence[Implicant], dont_care: Sequence[Implicant], k: int,
                  finite_inputs: bool = True) -> list[Implicant]:
    """Combine implicants to a fixpoint, then drop full-range variables.

    ``dont_care`` boxes may be absorbed into merges but never survive on
    their own.  Variables are scanned in name order, intervals by low end.
    """
    if not care:
        return []
    items = [(imp, True) for imp in care] + [(imp, False) for imp in dont_care
                                              if imp not in care]
    while True:
        names = sorted({v for imp, _ in items for v in imp.vars})
        changed = True
        while changed:
            changed = False
            for var in names:
                items, hit = _combine_on(items, var)
                changed |= hit
        kept = [imp for imp, c in items if c]
        if not finite_inputs:
            return sorted(set(kept), key=_order)
        reduced = eliminate_full_range(sorted(set(kept), key=_order), k)
        if len(reduced) == 1 and reduced[0].is_constant:
            return reduced
        if reduced == sorted(set(kept), key=_order):
            return reduced
        items = [(imp, True) for imp in reduced] + [
            (imp, False) for imp in eliminate_full_range(dont_care, k)
            if imp not in reduced and not imp.is_constant]


def _order(imp: Implicant):
    return (imp.bounds, repr(imp.terms))


def minimize(form: StandardForm, finite_inputs: bool | None = None) -> StandardForm:
    """Minimize every meta implicant of ``form``.

    For the meta implicant with cap ``m``, the regions already covered by
    smaller caps are don't-cares: the output there is decided by the
    smaller cap, whatever this meta implicant does.
    """
    finite = form.finite_inputs if finite_inputs is None else finite_inputs
    outs = {}
    for name, metas in form.outputs.items():
        new = {}
        lower: list[Implicant] = []
        for cap in sorted(metas):
            care = metas[cap]
            dc = [replace(imp, cap=cap) for imp in lower]
            new[cap] = minimize_meta(care, dc, form.k, finite)
            lower += care
        outs[name] = new
    return StandardForm(form.k, form.inputs, outs, finite)


def synthesize(table: FunctionTable, minimized: bool = True) -> StandardForm:
    form = table_to_minterms(table)
    return minimize(form) if minimized else form


def check_form(form: StandardForm, table: FunctionTable) -> list[tuple]:
    """Rows where ``form`` disagrees with the table (R-referenced)."""
    f = form_function(form)
    bad = []
    for xs, ys in sorted(table.rows.items()):
        got = f(dict(zip(table.inputs, xs)))
        want = {n: y + table.k for n, y in zip(table.outputs, ys)}
        if got != want:
            bad.append((xs, want, got))
    return bad


def _diagonal(e: Expr) -> tuple[tuple[str, ...], int, int] | None:
    """``(vars, c, cap)`` when ``e`` is ``V1==c | V2==c | ... | cap``."""
    terms = flatten(e, OpKind.MAX)
    caps = [t for t in terms if isinstance(t, Const)]
    eqs = [t for t in terms if not isinstance(t, Const)]
    if len(caps) != 1 or len(eqs) < 2:
        return None
    names, consts = [], set()
    for t in eqs:
        if not (isinstance(t, Bin) and t.op is OpKind.EQ and isinstance(t.left, Var)
                and isinstance(t.right, Const)):
            return None
        names.append(t.left.name)
        consts.add(t.right.n)
    if len(consts) != 1 or len(set(names)) != len(names):
        return None
    return tuple(sorted(names)), consts.pop(), caps[0].n


@dataclass
class EqualityCombined:
    exprs: dict[str, Expr]
    before: CostReport
    after: CostReport


def equality_combine(minterms: Mapping[str, Sequence[Expr]] | StandardForm) -> EqualityCombined:
    """Route diagonal minterms through one shared ``A == B`` comparator.

    ``A==c | B==c | m`` becomes ``(A == B) == c | m``; rewritten terms with
    the same cap are gathered as ``(X == c1 & X == c2 ...) | m``.  Terms of
    any other shape are left alone.
    """
    if isinstance(minterms, StandardForm):
        minterms = {n: [imp.to_expr() for imp in minterms.implicants(n)]
                    for n in minterms.outputs}
    before = gate_cost(min_of(*ts) for ts in minterms.values() if ts)
    exprs = {}
    for name, terms in minterms.items():
        slots: list = []
        groups: dict[tuple, list[Expr]] = {}
        for t in terms:
            d = _diagonal(t)
            if d is None:
                slots.append(t)
                continue
            names, c, cap = d
            key = (names, cap)
            if key not in groups:
                groups[key] = []
                slots.append(key)
            x: Expr = Var(names[0])
            for v in names[1:]:
                x = Bin(OpKind.EQ, x, Var(v))
            groups[key].append(Bin(OpKind.EQ, x, Const(c)))
        rebuilt = [s if isinstance(s, Expr) else max_of(min_of(*groups[s]), Const(s[1]))
                   for s in slots]
        if rebuilt:
            exprs[name] = min_of(*rebuilt)
    return EqualityCombined(exprs, before, gate_cost(exprs.values()))
