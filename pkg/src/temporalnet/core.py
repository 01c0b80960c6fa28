"""Temporal values and the primitive space-time operators.

A temporal value is the arrival time of a spike: a non-negative ``int`` or
:data:`INF` for a spike that never occurs.  ``INF`` is ``math.inf`` so the
ordinary ``<``/``min``/``max`` already place it above every finite time.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

INF = math.inf

TValue = Union[int, float]

#: default ceiling on exhaustive sweeps, in input tuples
ENUMERATION_CAP = 10**7


class DomainTooLarge(ValueError):
    """Raised when an exhaustive sweep would exceed the enumeration cap."""


class OpKind(enum.Enum):
    MIN = "min"
    LE = "le"
    NE = "ne"
    XMIN = "xmin"
    LT = "lt"
    MAX = "max"
    XMAX = "xmax"
    GE = "ge"
    EQ = "eq"
    GT = "gt"
    DELAY = "delay"
    IDENTITY = "id"

    @property
    def arity(self) -> int:
        return 1 if self in (OpKind.DELAY, OpKind.IDENTITY) else 2

    @property
    def commutative(self) -> bool:
        return self in COMMUTATIVE


BINARY_OPS = tuple(op for op in OpKind if op.arity == 2)
# ne passes its first input through, so ne(a, b) and ne(b, a) differ
COMMUTATIVE = frozenset({OpKind.MIN, OpKind.MAX, OpKind.EQ, OpKind.XMIN, OpKind.XMAX})
RELATIONAL = frozenset({OpKind.LT, OpKind.LE, OpKind.GT, OpKind.GE,
                        OpKind.EQ, OpKind.NE})


def apply_binary(op: OpKind, a: TValue, b: TValue) -> TValue:
    """Evaluate one of the ten 2-ary operators.

    Relational operators pass their first argument through when the
    relation holds and return ``INF`` otherwise.
    """
    if op is OpKind.MIN:
        return a if a <= b else b
    if op is OpKind.MAX:
        return a if a >= b else b
    if op is OpKind.LT:
        return a if a < b else INF
    if op is OpKind.LE:
        return a if a <= b else INF
    if op is OpKind.GT:
        return a if a > b else INF
    if op is OpKind.GE:
        return a if a >= b else INF
    if op is OpKind.EQ:
        return a if a == b else INF
    if op is OpKind.NE:
        return a if a != b else INF
    if op is OpKind.XMIN:
        if a < b:
            return a
        return b if b < a else INF
    if op is OpKind.XMAX:
        if a > b:
            return a
        return b if b > a else INF
    raise ValueError(f"{op} is not a 2-ary operator")


def delay_finite(a: TValue, c: int, k: int) -> TValue:
    """Apply ``c`` unit delays in the finite algebra S_k.

    A unit delay of ``k-1`` overflows the gamma window and becomes ``INF``.
    """
    if c < 1:
        raise ValueError("delay amount must be positive")
    for _ in range(c):
        if a >= k - 1:
            return INF
        a = a + 1
    return a


def delay(a: TValue, c: int, k: int | None = None) -> TValue:
    """Delay by ``c``; unbounded when ``k`` is None, else the S_k rule."""
    if k is None:
        return a + c
    return delay_finite(a, c, k)


def shift(a: TValue, k: int | None = None) -> TValue:
    """Shift an input by one unit (the S_k increment when ``k`` is given)."""
    return delay(a, 1, k)


def domain(k: int) -> list[TValue]:
    """The value set of S_k: ``[0, 1, ..., k-1, INF]``."""
    return [*range(k), INF]


def check_cap(k: int, q: int, cap: int = ENUMERATION_CAP) -> int:
    n = (k + 1) ** q
    if n > cap:
        raise DomainTooLarge(f"(k+1)^q = {n} tuples exceeds cap {cap}")
    return n


def sweep(k: int, q: int, cap: int = ENUMERATION_CAP):
    """Iterate over all of S_k^q in lexicographic order."""
    check_cap(k, q, cap)
    return itertools.product(domain(k), repeat=q)


@dataclass
class CheckResult:
    """Outcome of an exhaustive check; truthy when it passed."""

    ok: bool
    counterexample: tuple | None = None
    detail: str = ""
    checked: int = 0
    failures: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def check_finite_invariance(f: Callable[..., TValue], k: int, q: int = 2,
                            cap: int = ENUMERATION_CAP) -> CheckResult:
    """Exhaustively check the S_k form of temporal invariance for ``f``.

    For every tuple ``x`` in S_k^q: when ``f(x) + 1 < k`` the shifted tuple
    must give ``f(x) + 1``, otherwise it must give ``INF``.  Shifting uses the
    finite increment, so ``k-1`` inputs become ``INF``.
    """
    n = 0
    for xs in sweep(k, q, cap):
        n += 1
        z = f(*xs)
        shifted = f(*(shift(x, k) for x in xs))
        expected = z + 1 if z + 1 < k else INF
        if shifted != expected:
            return CheckResult(False, xs,
                               f"f{xs}={z} but f(shifted)={shifted}, "
                               f"expected {expected}", n)
    return CheckResult(True, checked=n)


def format_value(v: TValue) -> str:
    if v == INF:
        return "inf"
    if isinstance(v, float) and not v.is_integer():
        return repr(v)
    return str(int(v))


def parse_value(text: str) -> TValue:
    text = text.strip()
    if text.lower() in ("inf", "∞"):
        return INF
    v = int(text)
    if v < 0:
        raise ValueError(f"negative time {v}")
    return v


def normalize(v: TValue, k: int) -> TValue:
    """Map a value onto S_k: anything at or past ``k`` never occurs."""
    return v if v < k else INF


def is_finite(v: TValue) -> bool:
    return v != INF


def values_in(vs: Sequence[TValue], k: int) -> bool:
    return all(v == INF or 0 <= v < k for v in vs)
