import pytest

from temporalnet.cli import main
from temporalnet.synthesis import adder_table, synthesize


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv,want", [
    (["A==0 | B==0 | 4", "A=0", "B=0", "k=4"], "4"),
    (["a & b", "a=inf", "b=3"], "3"),
    (["a+1", "a=3", "k=4"], "inf"),
    (["a+1", "a=3", "-k", "8"], "4"),
])
def test_eval(capsys, argv, want):
    code, out, _ = run(capsys, "eval", *argv)
    assert code == 0 and out.strip() == want


@pytest.mark.parametrize("argv", [["a <"], ["a & b", "a=1"], ["a", "a"], ["a", "a=-2"]])
def test_eval_errors(capsys, argv):
    code, _, err = run(capsys, "eval", *argv)
    assert code == 2 and err.startswith("error:")


def test_usage(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "verify")[0] == 2


def test_synthesize_cost(capsys, data):
    code, out, _ = run(capsys, "synthesize", data / "diagonal.table", "--equality-combine", "--cost")
    assert code == 0
    assert out.splitlines()[-1] == "before: 19 after: 10"


def test_synthesize_minimize(capsys, data):
    code, out, _ = run(capsys, "synthesize", data / "half_adder.table", "--minimize", "--cost")
    assert code == 0
    cout = [l for l in out.splitlines() if l.startswith("Cout = ")][0]
    assert cout.endswith("& 5")
    assert cout.count("| 4)") == 4
    assert out.splitlines()[-1].startswith("before: ")


def test_synthesize_empty(capsys, data):
    code, out, _ = run(capsys, "synthesize", data / "empty.table", "--cost")
    assert code == 0 and out.splitlines()[-1] == "before: 0 after: 0"


def test_synthesize_deterministic(capsys, data):
    a = run(capsys, "synthesize", data / "half_adder.table", "--minimize", "--emit", "netlist")
    b = run(capsys, "synthesize", data / "half_adder.table", "--minimize", "--emit", "netlist")
    assert a == b and a[1].startswith("k=4\n")


def test_synthesize_bad_table(capsys, tmp_path):
    p = tmp_path / "bad.table"
    p.write_text("k=4\ninputs: A\noutputs: Y\n7 : 1\n")
    assert run(capsys, "synthesize", p)[0] == 2
    assert run(capsys, "synthesize", tmp_path / "missing.table")[0] == 2


def test_verify(capsys, tmp_path):
    net = tmp_path / "ha.net"
    net.write_text(synthesize(adder_table(4)).to_netlist().to_text())
    code, out, _ = run(capsys, "verify", net)
    assert code == 0 and out.startswith("pass")
    bad = tmp_path / "bad.net"
    bad.write_text("k=4\ninputs: a,b\noutputs: y\nm = min(a,b)\ny = dec(m)\n")
    code, out, _ = run(capsys, "verify", bad)
    assert code == 1 and out.startswith("FAIL") and "(a=" in out


def test_verify_fsm(capsys):
    code, out, _ = run(capsys, "verify", "--fsm", "min", "-k", "4")
    assert code == 0 and "pass" in out
    code, out, _ = run(capsys, "verify", "--fsm", "max", "-k", "2", "-k", "8")
    assert code == 0 and out.count("pass") == 2


def test_fsm_check(capsys):
    assert run(capsys, "fsm-check", "delay", "--cycles", "3", "--samples", "200")[0] == 0
    assert run(capsys, "fsm-check", "min", "--cycles", "3", "--lossy-reset")[0] == 1
    assert run(capsys, "fsm-check", "max", "--cycles", "2", "--no-reset")[0] == 1


def test_simulate(capsys, tmp_path):
    net = tmp_path / "ha.net"
    net.write_text(synthesize(adder_table(4)).to_netlist().to_text())
    code, out, _ = run(capsys, "simulate", net, "A=3", "B=3")
    assert code == 0 and out == "S = 6\nCout = 5\n"
    assert run(capsys, "simulate", net, "A=3", "B=3", "--fsm")[1] == out
    assert run(capsys, "simulate", net, "A=3")[0] == 2


def test_run_modes(capsys, data, tmp_path):
    paths = {m: tmp_path / f"{m}.tsv" for m in ("ideal", "fsm", "jitter")}
    assert run(capsys, "run", data / "running_sum.cfg", "--trace", paths["ideal"])[0] == 0
    assert run(capsys, "run", data / "running_sum.cfg", "--fsm", "--trace", paths["fsm"])[0] == 0
    code, out, _ = run(capsys, "run", data / "running_sum.cfg", "--jitter", "11",
                       "--trace", paths["jitter"])
    assert code == 0 and "max drift" in out and "cycles: 3 violations: 0" in out
    ideal = paths["ideal"].read_bytes()
    assert ideal == paths["fsm"].read_bytes() == paths["jitter"].read_bytes()
    assert b"2\tadder.S\t3\n" in ideal


def test_run_stdout(capsys, data):
    code, out, err = run(capsys, "run", data / "running_sum.cfg")
    assert code == 0 and out.startswith("cycle\tline\tvalue\n")
    assert "cycles: 3" in err
    assert run(capsys, "run", data / "running_sum.cfg", "--fsm", "--jitter", "1")[0] == 2
