import itertools

import pytest
from hypothesis import given, strategies as st

from temporalnet.core import INF, OpKind, apply_binary, domain
from temporalnet.fsm import (E, Y0, Y1, DelayGate, MalformedTrace, Spike, Violation,
                             builtin_fsm, check_equivalence, format_trace, format_violations,
                             parse_trace, parse_violation, run_fsm, values_to_trace)

OPS = {"delay": OpKind.DELAY, "min": OpKind.MIN, "max": OpKind.MAX}


def test_delay_table_rows():
    rows = builtin_fsm("delay").rows
    assert rows[(Y0, "t-")] == (Y1, "-")
    assert rows[(Y1, "--")] == (Y0, "t+1")
    assert rows[(Y1, "t-")] == (E, "E")
    assert rows[(Y1, "-0")] == (Y0, "-")
    assert len(rows) == 8


def test_min_max_tables_complete():
    for kind in ("min", "max"):
        rows = builtin_fsm(kind).rows
        assert len(rows) == 16
        assert {p for _, p in rows} == {"---", "t--", "-t-", "tt-", "--0", "-00", "0-0", "000"}


def test_lossy_min_differs_only_in_reset_rows():
    lossy, fixed = builtin_fsm("min", lossy_reset=True).rows, builtin_fsm("min").rows
    diff = {key for key in lossy if lossy[key] != fixed[key]}
    assert diff == {(Y1, "-00"), (Y1, "0-0"), (Y1, "000")}
    assert lossy[(Y1, "000")] == (Y0, "t")


@pytest.mark.parametrize("kind", ["delay", "min", "max"])
@pytest.mark.parametrize("k", [2, 4, 8])
def test_single_cycle_equivalence(kind, k):
    r = check_equivalence(builtin_fsm(kind), OPS[kind], k)
    assert r, r.detail
    assert r.checked == (k + 1) ** (1 if kind == "delay" else 2)


@pytest.mark.parametrize("kind", ["delay", "min", "max"])
def test_multi_cycle_equivalence(kind):
    assert check_equivalence(builtin_fsm(kind), OPS[kind], 4, n_cycles=3, samples=2000)


def test_delay_three_cycles_exhaustive():
    seqs = ([(a,), (b,), (c,)] for a, b, c in itertools.product(domain(4), repeat=3))
    assert check_equivalence(builtin_fsm("delay"), OpKind.DELAY, 4, sequences=seqs)


def test_reset_matters_for_max():
    seq = [[(1, INF), (2, 3)]]
    assert check_equivalence(builtin_fsm("max"), OpKind.MAX, 4, sequences=seq)
    r = check_equivalence(builtin_fsm("max"), OpKind.MAX, 4, sequences=seq, reset=False)
    assert not r
    assert r.counterexample == ((1, INF), (2, 3))


def test_lossy_min_fails_across_cycles():
    # a leftover Y1 followed by a spike at time 0 loses the output
    seq = [[(2, INF), (0, INF)]]
    assert check_equivalence(builtin_fsm("min"), OpKind.MIN, 4, sequences=seq)
    assert not check_equivalence(builtin_fsm("min", lossy_reset=True), OpKind.MIN, 4, sequences=seq)
    # single cycles always start in Y0, where the two tables agree
    assert check_equivalence(builtin_fsm("min", lossy_reset=True), OpKind.MIN, 4)


@pytest.mark.parametrize("op", [OpKind.LT, OpKind.LE, OpKind.GT, OpKind.GE, OpKind.EQ,
                                OpKind.NE, OpKind.XMIN, OpKind.XMAX, OpKind.MIN, OpKind.MAX])
def test_behavioral_models(op):
    assert check_equivalence(op, op, 4)
    assert check_equivalence(op, op, 4, n_cycles=3, samples=300)


def test_back_to_y0_after_reset():
    for kind in ("delay", "min", "max"):
        spec = builtin_fsm(kind)
        for state in (Y0, Y1):
            for pat in {p for s, p in spec.rows if s == state and p.endswith("0")}:
                assert spec.rows[(state, pat)][0] in (Y0, Y1)
    # after any one-cycle history, the reset at t=0 with quiet inputs gives Y0
    for kind in ("delay", "min", "max"):
        spec = builtin_fsm(kind)
        idle = "-" * len(spec.lines) + "0"
        for state in (Y0, Y1):
            assert spec.rows[(state, idle)][0] == Y0


def test_violation_on_double_spike():
    trace = [Spike(0, "a", 1), Spike(0, "a", 2)]
    run = run_fsm(builtin_fsm("delay"), trace, 4, 1)
    assert run.violations == [Violation("g0", 0, 2)]
    run = run_fsm(builtin_fsm("max"), [Spike(0, "a", 1), Spike(0, "a", 3)], 4, 1)
    assert [v.time for v in run.violations] == [3]
    assert str(run.violations[0]) == "E: gate g0 cycle 0 time 3"


def test_delay_pending_cancelled_by_reset():
    run = run_fsm(builtin_fsm("delay"), [Spike(0, "a", 3)], 4, 2)
    assert run.values(2) == [INF, INF]
    run = run_fsm(DelayGate(2, horizon=4), [Spike(0, "a", 1)], 4, 1)
    assert run.values(1) == [3]


def test_malformed():
    with pytest.raises(MalformedTrace):
        run_fsm(builtin_fsm("min"), [Spike(0, "a", 4)], 4, 1)
    with pytest.raises(MalformedTrace):
        run_fsm(builtin_fsm("min"), [Spike(0, "q", 1)], 4, 1)
    with pytest.raises(MalformedTrace):
        parse_trace("cycle x: a@1")
    with pytest.raises(MalformedTrace):
        parse_trace("cycle 0: a1")


def test_trace_text():
    trace = [Spike(0, "a", 2), Spike(0, "b", 0), Spike(2, "a", 1)]
    text = format_trace(trace)
    assert text == "cycle 0: b@0, a@2\ncycle 2: a@1\n"
    assert parse_trace(text) == sorted(trace)
    v = Violation("adder.t3", 4, 2)
    assert parse_violation(format_violations([v]).strip()) == v


def test_table_printable():
    text = builtin_fsm("min").table()
    assert "τ" in text and "Y1" in text


@given(st.lists(st.tuples(st.sampled_from(domain(4)), st.sampled_from(domain(4))),
                min_size=1, max_size=4))
def test_min_max_random_sequences(seq):
    for kind in ("min", "max"):
        run = run_fsm(builtin_fsm(kind), values_to_trace(seq, ("a", "b")), 4, len(seq))
        assert run.values(len(seq)) == [apply_binary(OPS[kind], a, b) for a, b in seq]
        assert not run.violations
        assert all(s == Y0 or s == Y1 for s in run.end_states)
