import itertools
import math

import pytest
from hypothesis import given, strategies as st

from temporalnet.core import (INF, BINARY_OPS, COMMUTATIVE, DomainTooLarge, OpKind,
                              apply_binary, check_cap, check_finite_invariance, delay,
                              delay_finite, domain, format_value, parse_value, shift)

# output for the orderings (a<b, a=b, b<a); "a" / "b" name the input passed
# through, "x" is INF
PATTERNS = {
    OpKind.MIN: "aab",
    OpKind.LE: "aax",
    OpKind.NE: "axa",
    OpKind.XMIN: "axb",
    OpKind.LT: "axx",
    OpKind.MAX: "baa",
    OpKind.XMAX: "bxa",
    OpKind.GE: "xaa",
    OpKind.EQ: "xax",
    OpKind.GT: "xxa",
}


def oracle(op, a, b):
    col = 0 if a < b else (1 if a == b else 2)
    return {"a": a, "b": b, "x": INF}[PATTERNS[op][col]]


def test_ten_operators():
    assert set(BINARY_OPS) == set(PATTERNS)
    assert len(BINARY_OPS) == 10


@pytest.mark.parametrize("op", list(PATTERNS))
def test_table_patterns(op):
    for a, b in itertools.product(domain(5), repeat=2):
        assert apply_binary(op, a, b) == oracle(op, a, b), (op, a, b)


def test_spot_values():
    assert apply_binary(OpKind.MIN, INF, 3) == 3
    assert apply_binary(OpKind.MAX, INF, 3) == INF
    assert apply_binary(OpKind.LT, 2, 3) == 2
    assert apply_binary(OpKind.LT, 3, 2) == INF
    assert apply_binary(OpKind.EQ, INF, INF) == INF
    assert apply_binary(OpKind.XMAX, 1, 1) == INF


def test_commutativity_flags():
    for op in BINARY_OPS:
        sym = all(apply_binary(op, a, b) == apply_binary(op, b, a)
                  for a, b in itertools.product(domain(4), repeat=2))
        assert sym == (op in COMMUTATIVE), op
        assert op.commutative == sym


def test_finite_delay():
    assert delay_finite(0, 1, 4) == 1
    assert delay_finite(2, 1, 4) == 3
    assert delay_finite(3, 1, 4) == INF
    assert delay_finite(2, 2, 4) == INF
    assert delay_finite(INF, 1, 4) == INF
    assert delay(3, 1) == 4
    assert shift(3, 4) == INF
    with pytest.raises(ValueError):
        delay_finite(0, 0, 4)


def test_domain():
    assert domain(3) == [0, 1, 2, INF]


def test_format_parse():
    assert format_value(INF) == "inf"
    assert format_value(3) == "3"
    assert parse_value("inf") == INF
    assert parse_value(" 7 ") == 7
    with pytest.raises(ValueError):
        parse_value("-1")
    with pytest.raises(ValueError):
        parse_value("x")


def test_cap():
    assert check_cap(4, 3) == 125
    with pytest.raises(DomainTooLarge):
        check_cap(9, 8, cap=10**6)


@pytest.mark.parametrize("op", BINARY_OPS)
@pytest.mark.parametrize("k", [2, 4, 6])
def test_operators_finitely_invariant(op, k):
    assert check_finite_invariance(lambda a, b: apply_binary(op, a, b), k)


def test_invariance_catches_constant():
    r = check_finite_invariance(lambda a, b: 0, 4)
    assert not r
    assert r.counterexample is not None


@given(st.sampled_from(BINARY_OPS), st.integers(0, 9) | st.just(INF),
       st.integers(0, 9) | st.just(INF))
def test_output_is_an_input(op, a, b):
    z = apply_binary(op, a, b)
    assert z in (a, b, INF)
    if z != INF:
        assert z >= min(a, b)


@given(st.integers(0, 20), st.integers(1, 5), st.integers(2, 12))
def test_delay_matches_unbounded_below_window(a, c, k):
    z = delay_finite(a, c, k)
    assert z == (a + c if a + c <= k - 1 else INF)
    assert not math.isnan(z)
