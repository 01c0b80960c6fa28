import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from temporalnet.core import INF, OpKind, apply_binary, domain
from temporalnet.expr import evaluate, parse
from temporalnet.network import check_st_axioms, evaluate as eval_netlist
from temporalnet.synthesis import (FunctionTable, Implicant, TableError, adder_table,
                                   check_form, combine_implicants, eliminate_full_range,
                                   equality_combine, eval_form, minimize, parse_table,
                                   random_table, re_reference, synthesize, table_to_minterms)

# (A, B) -> (S, Cout), R-referenced and R+-referenced, copied from the worked table
HALF_ADDER_ROWS = """\
0 0 4 4 0 0
0 1 5 4 1 0
0 2 6 4 2 0
0 3 7 4 3 0
1 0 5 4 1 0
1 1 6 4 2 0
1 2 7 4 3 0
1 3 4 5 0 1
2 0 6 4 2 0
2 1 7 4 3 0
2 2 4 5 0 1
2 3 5 5 1 1
3 0 7 4 3 0
3 1 4 5 0 1
3 2 5 5 1 1
3 3 6 5 2 1
"""
ROWS = {tuple(r[:2]): tuple(r[2:]) for r in
        (list(map(int, line.split())) for line in HALF_ADDER_ROWS.splitlines())}

# carry as a hand-written expression, independent of the minimizer
COUT = parse("(A==0 | 4) & (B==0 | 4) & (A==1 | B<=2 | 4) & (B==1 | A<=2 | 4) & 5")


def test_adder_table_matches_rows():
    t = adder_table(4)
    for xs, (s, c, s1, c1) in ROWS.items():
        assert t.rows[xs] == (s1, c1)
        assert t.r_referenced(xs) == {"S": s, "Cout": c}


@pytest.mark.parametrize("minimized", [False, True])
def test_half_adder_both_views(minimized):
    form = synthesize(adder_table(4), minimized)
    for (a, b), (s, c, s1, c1) in ROWS.items():
        got = eval_form(form, {"A": a, "B": b})
        assert got == {"S": s, "Cout": c}
        assert {n: re_reference(v, 4) for n, v in got.items()} == {"S": s1, "Cout": c1}


def test_minterm_shape():
    form = table_to_minterms(adder_table(4))
    assert sorted(form.outputs["S"]) == [4, 5, 6, 7]
    assert len(form.meta("S", 4)) == 4
    assert len(form.meta("Cout", 4)) == 10
    assert str(form.meta("Cout", 5)[0]) == "[A == 1 | B == 3 | 5]"


def test_cout_minimized():
    form = minimize(table_to_minterms(adder_table(4)))
    m4, m5 = form.meta("Cout", 4), form.meta("Cout", 5)
    assert len(m4) == 4
    assert len(m5) == 1 and m5[0].is_constant and m5[0].cap == 5
    e = form.to_exprs()["Cout"]
    for a, b in itertools.product(range(4), repeat=2):
        env = {"A": a, "B": b}
        assert evaluate(e, env, 4) == evaluate(COUT, env, 4)


def test_pair_combine():
    # [A==0 | B==1] & [A==0 | B==2] merges on B
    p = Implicant.minterm(("A", "B"), (0, 1), 4)
    q = Implicant.minterm(("A", "B"), (0, 2), 4)
    m = combine_implicants(p, q)
    assert m.interval("B") == (1, 2) and m.interval("A") == (0, 0)
    assert combine_implicants(p, Implicant.minterm(("A", "B"), (0, 3), 4)) is None
    assert combine_implicants(p, Implicant.minterm(("A", "B"), (1, 2), 4)) is None
    assert combine_implicants(p, Implicant.minterm(("A", "B"), (0, 2), 5)) is None


def test_full_range():
    imps = [Implicant((("A", 0, 3), ("B", 1, 1)), 4)]
    assert eliminate_full_range(imps, 4) == [Implicant((("B", 1, 1),), 4)]
    imps = [Implicant((("A", 0, 3),), 4), Implicant((("B", 1, 1),), 4)]
    out = eliminate_full_range(imps, 4)
    assert len(out) == 1 and out[0].is_constant


def test_full_range_needs_finite_inputs():
    table = FunctionTable(2, ("A",), ("Y",), {(0,): (0,), (1,): (0,)})
    form = synthesize(table)
    # a constant fires even when A never spikes
    assert eval_form(form, {"A": INF}) == {"Y": 2}
    kept = minimize(table_to_minterms(table), finite_inputs=False)
    assert eval_form(kept, {"A": INF}) == {"Y": INF}


def test_equality_combining_counts():
    minterms = {"S": [parse(f"A=={c} | B=={c} | {m}") for c, m in [(0, 4), (1, 6), (2, 4), (3, 6)]]}
    r = equality_combine(minterms)
    assert (r.before[OpKind.EQ], r.before[OpKind.MIN], r.before[OpKind.MAX], r.before.total) == (8, 3, 8, 19)
    assert (r.after[OpKind.EQ], r.after[OpKind.MIN], r.after[OpKind.MAX], r.after.total) == (5, 3, 2, 10)
    e = r.exprs["S"]
    for a, b in itertools.product(range(4), repeat=2):
        if a == b:
            assert evaluate(e, {"A": a, "B": b}, 4) == ROWS[(a, b)][0]
        else:
            assert evaluate(e, {"A": a, "B": b}, 4) == INF


def test_equality_combining_from_table(data):
    table = parse_table((data / "diagonal.table").read_text())
    r = equality_combine(table_to_minterms(table))
    assert (r.before.total, r.after.total) == (19, 10)


def test_table_format(data):
    t = parse_table((data / "half_adder.table").read_text())
    assert t.rows == adder_table(4).rows
    assert parse_table(t.to_text()).rows == t.rows
    empty = parse_table((data / "empty.table").read_text())
    form = synthesize(empty)
    assert form.cost().total == 0
    assert eval_form(form, {"A": 0, "B": 0}) == {"S": INF}


@pytest.mark.parametrize("text", [
    "inputs: A\noutputs: Y\n0 : 0\n",
    "k=4\ninputs: A\noutputs: Y\n0 0\n",
    "k=4\ninputs: A\noutputs: Y\n4 : 0\n",
    "k=4\ninputs: A\noutputs: Y\n0 : 9\n",
    "k=4\ninputs: A\noutputs: Y\n0 : 1\n0 : 2\n",
    "k=4\ninputs: A\noutputs: Y\n0 1 : 1\n",
])
def test_table_errors(text):
    with pytest.raises(TableError):
        parse_table(text)


def test_netlist_from_form():
    form = synthesize(adder_table(4))
    net = form.to_netlist()
    assert check_st_axioms(net)
    for (a, b), (s, c, _, _) in ROWS.items():
        assert eval_netlist(net, {"R": 0, "A": a, "B": b}) == {"S": s, "Cout": c}


def test_equations_reparse():
    form = synthesize(adder_table(4))
    for line in form.equations().splitlines():
        name, _, text = line.partition(" = ")
        e = parse(text)
        for xs, ys in adder_table(4).rows.items():
            want = ys[("S", "Cout").index(name)] + 4
            assert evaluate(e, dict(zip("AB", xs)), 4) == want


def test_literal_interval_form():
    imp = Implicant((("A", 1, 2),), 5)
    assert str(imp.to_expr(literal=True)) == "1 <= A | A <= 2 | 5"
    assert str(imp.to_expr()) == "1 <= A | A <= 2 | 5"
    assert str(Implicant((("A", 2, 2),), 5).to_expr(literal=True)) == "2 <= A | A <= 2 | 5"
    assert str(Implicant((("A", 0, 2),), 5).to_expr()) == "A <= 2 | 5"


# -- merging overlapping intervals ----------------------------------------------

LE = OpKind.LE


def le(a, b):
    return apply_binary(LE, a, b)


def test_merge_identities_exhaustive():
    k = 6
    consts = range(k)
    for a, b in itertools.product(consts, repeat=2):
        for c in domain(k):
            lhs = min(le(a, c), le(c, b))
            if a <= b:
                assert lhs == min(a, c)                   # window collapses to min
            if a == b + 1:
                assert lhs == min(a, c)                   # adjacent bounds
            if a <= b + 1:
                assert lhs == min(a, c)                   # both cases at once
            if a <= b:
                assert min(le(a, c), le(b, c)) == le(a, c)   # tighter lower bound wins
                assert min(le(c, a), le(c, b)) == le(c, b)   # tighter upper bound wins
    for a, b in itertools.product(domain(k), repeat=2):
        assert max(le(a, b), min(a, b)) == le(a, b)       # absorption


def merge_instance(rng, k):
    i = rng.randrange(k)
    j = rng.randrange(i, k)
    n = rng.randrange(i, min(j + 1, k - 1) + 1)
    p = rng.randrange(max(n, j), k)
    m = rng.randrange(k, 2 * k)
    lo = rng.randrange(k)
    t = rng.choice([f"B == {lo}", f"({lo} <= B) | (B <= {rng.randrange(lo, k)})", "B < C", ""])
    return i, j, n, p, m, t


def check_merge(inst, k):
    i, j, n, p, m, t = inst
    tail = f" | {t} | {m}" if t else f" | {m}"
    left = parse(f"(({i} <= A) | (A <= {j}){tail}) & (({n} <= A) | (A <= {p}){tail})")
    right = parse(f"({i} <= A) | (A <= {p}){tail}")
    for a, b, c in itertools.product(domain(k), repeat=3):
        env = {"A": a, "B": b, "C": c}
        if evaluate(left, env, k) != evaluate(right, env, k):
            return env
    return None


def test_merge_randomized():
    rng = random.Random(2)
    for _ in range(100):
        inst = merge_instance(rng, 6)
        assert check_merge(inst, 6) is None, inst


def test_merge_rejects_gap():
    # intervals (0,1) and (3,4) leave a hole at 2
    assert check_merge((0, 1, 3, 4, 7, ""), 6) is not None


@settings(max_examples=200)
@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
def test_combine_matches_union(i, j, n, p):
    k = 6
    if not (i <= j and n <= p):
        return
    a = Implicant((("A", i, j), ("B", 2, 2)), 7)
    b = Implicant((("A", n, p), ("B", 2, 2)), 7)
    merged = combine_implicants(a, b)
    union = set(range(i, j + 1)) | set(range(n, p + 1))
    (i, j), (n, p) = sorted([(i, j), (n, p)])
    if merged is None:
        # a hole between the intervals, or one strictly inside the other
        assert n > j + 1 or p < j or (i, j) == (n, p)
        return
    assert set(range(*[merged.interval("A")[0], merged.interval("A")[1] + 1])) == union
    ea, eb, em = a.to_expr(True), b.to_expr(True), merged.to_expr(True)
    for x, y in itertools.product(domain(k), repeat=2):
        env = {"A": x, "B": y}
        assert evaluate(em, env, k) == min(evaluate(ea, env, k), evaluate(eb, env, k))


# -- random tables ----------------------------------------------------------------

@pytest.mark.parametrize("seed", range(15))
def test_random_tables(seed):
    rng = random.Random(seed)
    table = random_table(rng, rng.choice([3, 4]), 2, rng.randint(1, 2), p_inf=0.2)
    raw = table_to_minterms(table)
    mini = minimize(raw)
    assert check_form(raw, table) == []
    assert check_form(mini, table) == []
    for name in table.outputs:
        assert len(mini.implicants(name)) <= len(raw.implicants(name))
