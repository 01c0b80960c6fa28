"""Expression language over space-time operators.

Grammar, loosest to tightest binding::

    expr    := and ('|' and)*              # max
    and     := rel ('&' rel)*              # min
    rel     := postfix [RELOP postfix]     # non-associative
    postfix := atom ('+' INT)*             # delay
    atom    := IDENT | INT | '(' expr ')' | ('xmin'|'xmax') '(' expr ',' expr ')'

``RELOP`` is one of ``< <= > >= == !=``.  An integer literal ``n`` is the
reference tap ``R + n`` and evaluates to ``n`` because the reference ``R`` is
time 0.  ``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .core import INF, OpKind, TValue, apply_binary, delay


class Expr:
    __slots__ = ()

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Const(Expr):
    """Reference tap ``R + n``."""

    n: int


@dataclass(frozen=True)
class Delay(Expr):
    child: Expr
    c: int


@dataclass(frozen=True)
class Bin(Expr):
    op: OpKind
    left: Expr
    right: Expr


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class UnboundVariable(KeyError):
    pass


class ShapeError(ValueError):
    """An expression does not have the shape a rewrite expects."""


REL_TOKENS = {
    "<": OpKind.LT,
    "<=": OpKind.LE,
    ">": OpKind.GT,
    ">=": OpKind.GE,
    "==": OpKind.EQ,
    "!=": OpKind.NE,
}
REL_SYMBOLS = {op: tok for tok, op in REL_TOKENS.items()}
FUNC_TOKENS = {"xmin": OpKind.XMIN, "xmax": OpKind.XMAX}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|==|!=|<|>|&|\||\+|\(|\)|,)
""", re.VERBOSE)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.advance()
        if tok[1] != value or tok[0] == "eof":
            raise ParseError(f"expected {value!r}, got {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse(self) -> Expr:
        e = self.parse_or()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def parse_or(self) -> Expr:
        e = self.parse_and()
        while self.peek()[1] == "|":
            self.advance()
            e = Bin(OpKind.MAX, e, self.parse_and())
        return e

    def parse_and(self) -> Expr:
        e = self.parse_rel()
        while self.peek()[1] == "&":
            self.advance()
            e = Bin(OpKind.MIN, e, self.parse_rel())
        return e

    def parse_rel(self) -> Expr:
        e = self.parse_postfix()
        tok = self.peek()
        if tok[0] == "op" and tok[1] in REL_TOKENS:
            self.advance()
            e = Bin(REL_TOKENS[tok[1]], e, self.parse_postfix())
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] in REL_TOKENS:
                raise ParseError("relational operators do not chain; add parentheses", nxt[2])
        return e

    def parse_postfix(self) -> Expr:
        e = self.parse_atom()
        while self.peek()[1] == "+":
            plus = self.advance()
            tok = self.advance()
            if tok[0] != "int":
                raise ParseError("expected delay amount after '+'", tok[2])
            c = int(tok[1])
            if c < 1:
                raise ParseError("delay amount must be positive", plus[2])
            e = Delay(e, c)
        return e

    def parse_atom(self) -> Expr:
        tok = self.advance()
        kind, value, pos = tok
        if kind == "int":
            return Const(int(value))
        if kind == "ident":
            if value in FUNC_TOKENS and self.peek()[1] == "(":
                self.advance()
                left = self.parse_or()
                self.expect(",")
                right = self.parse_or()
                self.expect(")")
                return Bin(FUNC_TOKENS[value], left, right)
            return Var(value)
        if value == "(":
            e = self.parse_or()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos)


def parse(text: str) -> Expr:
    """Parse one expression."""
    return _Parser(text).parse()


# binding strength used by the printer
_OR, _AND, _REL, _POSTFIX, _ATOM = range(1, 6)


def _level(e: Expr) -> int:
    if isinstance(e, Bin):
        if e.op is OpKind.MAX:
            return _OR
        if e.op is OpKind.MIN:
            return _AND
        if e.op in REL_SYMBOLS:
            return _REL
        return _ATOM
    if isinstance(e, Delay):
        return _POSTFIX
    return _ATOM


def _wrap(e: Expr, need: int) -> str:
    s = format_expr(e)
    return f"({s})" if _level(e) < need else s


def format_expr(e: Expr) -> str:
    """Print with the fewest parentheses that still reparse to ``e``."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return str(e.n)
    if isinstance(e, Delay):
        return f"{_wrap(e.child, _POSTFIX)}+{e.c}"
    if e.op is OpKind.MAX:
        return f"{_wrap(e.left, _OR)} | {_wrap(e.right, _AND)}"
    if e.op is OpKind.MIN:
        return f"{_wrap(e.left, _AND)} & {_wrap(e.right, _REL)}"
    if e.op in REL_SYMBOLS:
        return f"{_wrap(e.left, _POSTFIX)} {REL_SYMBOLS[e.op]} {_wrap(e.right, _POSTFIX)}"
    return f"{e.op.value}({format_expr(e.left)}, {format_expr(e.right)})"


def evaluate(e: Expr, env: Mapping[str, TValue], k: int | None = None) -> TValue:
    """Evaluate bottom-up with zero gate delay.

    With ``k`` given, delays follow the S_k overflow rule; with ``k=None``
    the unbounded algebra is used.  Constants evaluate to themselves even
    when they reach past ``k-1`` (output caps live in ``k..2k-1``).
    """
    if isinstance(e, Bin):
        return apply_binary(e.op, evaluate(e.left, env, k), evaluate(e.right, env, k))
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundVariable(e.name) from None
    if isinstance(e, Const):
        return e.n
    if isinstance(e, Delay):
        return delay(evaluate(e.child, env, k), e.c, k)
    raise TypeError(f"not an expression: {e!r}")


def compile_expr(e: Expr, k: int | None = None) -> Callable[[Mapping[str, TValue]], TValue]:
    """Turn ``e`` into a closure; same semantics as :func:`evaluate`."""
    if isinstance(e, Var):
        name = e.name

        def var(env):
            try:
                return env[name]
            except KeyError:
                raise UnboundVariable(name) from None
        return var
    if isinstance(e, Const):
        n = e.n
        return lambda env: n
    if isinstance(e, Delay):
        child, c = compile_expr(e.child, k), e.c
        return lambda env: delay(child(env), c, k)
    left, right, op = compile_expr(e.left, k), compile_expr(e.right, k), e.op
    return lambda env: apply_binary(op, left(env), right(env))


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, Delay):
        return variables(e.child)
    return variables(e.left) | variables(e.right)


def constants(e: Expr) -> set[int]:
    if isinstance(e, Const):
        return {e.n}
    if isinstance(e, Var):
        return set()
    if isinstance(e, Delay):
        return constants(e.child)
    return constants(e.left) | constants(e.right)


def shift_constants(e: Expr, d: int) -> Expr:
    """Move every reference tap by ``d`` units."""
    if isinstance(e, Const):
        return Const(e.n + d)
    if isinstance(e, Var):
        return e
    if isinstance(e, Delay):
        return Delay(shift_constants(e.child, d), e.c)
    return Bin(e.op, shift_constants(e.left, d), shift_constants(e.right, d))


def join(op: OpKind, terms: Iterable[Expr]) -> Expr:
    """Left-associated chain ``t0 op t1 op ...``."""
    terms = list(terms)
    if not terms:
        raise ValueError("cannot join an empty term list")
    e = terms[0]
    for t in terms[1:]:
        e = Bin(op, e, t)
    return e


def max_of(*terms: Expr) -> Expr:
    return join(OpKind.MAX, terms)


def min_of(*terms: Expr) -> Expr:
    return join(OpKind.MIN, terms)


def flatten(e: Expr, op: OpKind) -> list[Expr]:
    """Operands of a (possibly nested) chain of ``op``."""
    if isinstance(e, Bin) and e.op is op:
        return flatten(e.left, op) + flatten(e.right, op)
    return [e]


def _eq_term(t: Expr) -> tuple[Var, Const] | None:
    if isinstance(t, Bin) and t.op is OpKind.EQ:
        if isinstance(t.left, Var) and isinstance(t.right, Const):
            return t.left, t.right
        if isinstance(t.left, Const) and isinstance(t.right, Var):
            return t.right, t.left
    return None


def rewrite_eq_to_interval(e: Expr, var: str | None = None) -> Expr:
    """Replace ``A == i`` terms of a max-implicant by ``(A <= i) | (i <= A)``.

    Only the terms on ``var`` are rewritten when it is given.  Raises
    :class:`ShapeError` if no equality term qualifies.
    """
    out = []
    hits = 0
    for t in flatten(e, OpKind.MAX):
        m = _eq_term(t)
        if m is not None and (var is None or m[0].name == var):
            v, i = m
            out += [Bin(OpKind.LE, v, i), Bin(OpKind.LE, i, v)]
            hits += 1
        else:
            out.append(t)
    if not hits:
        raise ShapeError(f"no 'var == const' term in {format_expr(e)}")
    return max_of(*out)


@dataclass(frozen=True)
class CostReport:
    """Operator-node counts after sharing identical subexpressions."""

    counts: Mapping[OpKind, int]
    total: int

    def __getitem__(self, op: OpKind) -> int:
        return self.counts.get(op, 0)

    def __str__(self) -> str:
        parts = [f"{n} {op.value}" for op, n in self.counts.items() if n]
        return ", ".join(parts + [f"{self.total} total"])


def _nodes(e: Expr, seen: set) -> None:
    if isinstance(e, (Var, Const)) or e in seen:
        return
    seen.add(e)
    if isinstance(e, Delay):
        _nodes(e.child, seen)
    else:
        _nodes(e.left, seen)
        _nodes(e.right, seen)


def gate_cost(exprs: Iterable[Expr]) -> CostReport:
    """Count gates across ``exprs``; a repeated subterm is built once.

    Variables and constants are free.  Delay nodes are tallied under
    ``OpKind.DELAY`` and included in the total.
    """
    seen: set = set()
    for e in exprs:
        _nodes(e, seen)
    counts = Counter(OpKind.DELAY if isinstance(n, Delay) else n.op for n in seen)
    ordered = {op: counts[op] for op in OpKind if counts[op]}
    return CostReport(ordered, sum(counts.values()))


def equivalent(e1: Expr, e2: Expr, k: int, names: Iterable[str] | None = None,
               values: Iterable[TValue] | None = None) -> dict | None:
    """Brute-force pointwise comparison; returns a differing env or None."""
    import itertools

    names = sorted(set(names) if names is not None else variables(e1) | variables(e2))
    values = list(values) if values is not None else [*range(k), INF]
    f1, f2 = compile_expr(e1, k), compile_expr(e2, k)
    for combo in itertools.product(values, repeat=len(names)):
        env = dict(zip(names, combo))
        if f1(env) != f2(env):
            return env
    return None
