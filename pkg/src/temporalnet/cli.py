"""Command-line front end.

Exit status: 0 on success, 1 when a check fails, 2 on bad usage or input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import DomainTooLarge, OpKind, format_value, parse_value
from .expr import ParseError, UnboundVariable, evaluate, parse
from .fsm import MalformedTrace, builtin_fsm, check_equivalence, format_violations
from .network import NetlistError, check_st_axioms, evaluate as eval_netlist, parse_netlist
from .pulse import PulseNetwork
from .synthesis import (TableError, equality_combine, minimize, parse_table,
                        table_to_minterms)
from .system import ConfigError, load_config, run_system, run_system_fsm, run_with_jitter

OK, FAIL, USAGE = 0, 1, 2

FSM_OPS = {"delay": OpKind.DELAY, "min": OpKind.MIN, "max": OpKind.MAX}


class UsageError(Exception):
    pass


def _bindings(items, allow_k=True):
    env, k = {}, None
    for item in items:
        name, sep, v = item.partition("=")
        if not sep:
            raise UsageError(f"expected NAME=VALUE, got {item!r}")
        if name == "k" and allow_k:
            k = int(v)
        else:
            env[name] = parse_value(v)
    return env, k


def cmd_eval(args) -> int:
    env, k = _bindings(args.bindings)
    k = args.k if args.k is not None else k
    print(format_value(evaluate(parse(args.expr), env, k)))
    return OK


def cmd_simulate(args) -> int:
    net = parse_netlist(Path(args.netlist).read_text(encoding="utf-8"))
    volley, _ = _bindings(args.bindings, allow_k=False)
    if net.ref is not None:
        volley.setdefault(net.ref, 0)
    missing = [i for i in net.inputs if i not in volley]
    if missing:
        raise UsageError(f"no value for input(s) {', '.join(missing)}")
    if args.fsm:
        outs, violations = PulseNetwork(net).run_cycle(volley)
        if violations:
            print(format_violations(violations), file=sys.stderr)
    else:
        outs = eval_netlist(net, volley)
    for name, v in outs.items():
        print(f"{name} = {format_value(v)}")
    return OK


def cmd_synthesize(args) -> int:
    table = parse_table(Path(args.table).read_text(encoding="utf-8"))
    form = table_to_minterms(table)
    before = form.cost()
    if args.minimize:
        form = minimize(form)
    after = form.cost()
    if args.equality_combine:
        combined = equality_combine(form)
        after = combined.after
        if args.emit == "netlist":
            raise UsageError("--equality-combine output is equations only")
        for name, e in combined.exprs.items():
            print(f"{name} = {e}")
    elif args.emit == "netlist":
        print(form.to_netlist().to_text(), end="")
    else:
        print(form.equations(), end="")
    if args.cost:
        print(f"# before: {before}")
        print(f"# after: {after}")
        print(f"before: {before.total} after: {after.total}")
    return OK


def cmd_verify(args) -> int:
    if args.fsm:
        ok = True
        for k in args.k or [4]:
            r = check_equivalence(builtin_fsm(args.fsm), FSM_OPS[args.fsm], k,
                                  n_cycles=args.cycles, samples=args.samples, seed=args.seed)
            print(f"fsm {args.fsm} k={k}: {'pass' if r else 'FAIL'} ({r.checked} checked)")
            if not r:
                print(f"counterexample: {r.detail}")
                ok = False
        return OK if ok else FAIL
    if not args.netlist:
        raise UsageError("give a netlist path or --fsm")
    net = parse_netlist(Path(args.netlist).read_text(encoding="utf-8"))
    r = check_st_axioms(net, args.algebra)
    if r:
        print(f"pass ({r.checked} input tuples)")
        return OK
    clause, xs, line, detail = r.failures[0]
    vals = ", ".join(f"{n}={format_value(v)}" for n, v in zip(net.inputs, xs))
    print(f"FAIL {clause} at ({vals}) on {line}: {detail}")
    return FAIL


def cmd_fsm_check(args) -> int:
    fsm = builtin_fsm(args.op, lossy_reset=args.lossy_reset)
    r = check_equivalence(fsm, FSM_OPS[args.op], args.k, n_cycles=args.cycles,
                          samples=args.samples, seed=args.seed, reset=not args.no_reset)
    print(f"{'pass' if r else 'FAIL'} ({r.checked} sequences)")
    if not r:
        print(f"counterexample: {r.detail}")
    return OK if r else FAIL


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.fsm and args.jitter is not None:
        raise UsageError("--fsm and --jitter are exclusive")
    drift = None
    if args.fsm:
        trace = run_system_fsm(cfg)
    elif args.jitter is not None:
        from .system import JitterSpec

        spec = cfg.jitter or JitterSpec()
        spec = JitterSpec(spec.eps, args.jitter, spec.scope, dict(spec.offsets))
        trace, report = run_with_jitter(cfg, spec)
        drift = report
    else:
        trace = run_system(cfg)
    text = trace.to_tsv()
    if args.trace:
        Path(args.trace).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    out = sys.stderr if not args.trace else sys.stdout
    print(f"cycles: {len(trace.records)} violations: {len(trace.violations)}", file=out)
    if trace.violations:
        print(format_violations(trace.violations), file=out)
    if drift is not None:
        print(f"max drift: {drift.max_drift:+.3f} at {drift.worst or '-'}", file=out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="temporalnet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate an expression")
    e.add_argument("expr")
    e.add_argument("bindings", nargs="*", help="NAME=VALUE (k=N sets the window)")
    e.add_argument("-k", type=int, default=None)
    e.set_defaults(fn=cmd_eval)

    s = sub.add_parser("simulate", help="run a netlist on one input volley")
    s.add_argument("netlist")
    s.add_argument("bindings", nargs="*", help="INPUT=VALUE")
    s.add_argument("--fsm", action="store_true", help="use pulse-mode gate models")
    s.set_defaults(fn=cmd_simulate)

    y = sub.add_parser("synthesize", help="function table to standard form")
    y.add_argument("table")
    y.add_argument("--minimize", action="store_true")
    y.add_argument("--equality-combine", action="store_true")
    y.add_argument("--emit", choices=("equations", "netlist"), default="equations")
    y.add_argument("--cost", action="store_true")
    y.set_defaults(fn=cmd_synthesize)

    v = sub.add_parser("verify", help="check axioms of a netlist or an FSM")
    v.add_argument("netlist", nargs="?")
    v.add_argument("--fsm", choices=sorted(FSM_OPS))
    v.add_argument("-k", type=int, action="append", help="repeatable (FSM mode)")
    v.add_argument("--algebra", choices=("auto", "finite", "unbounded"), default="auto")
    v.add_argument("--cycles", type=int, default=1)
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(fn=cmd_verify)

    f = sub.add_parser("fsm-check", help="pulse-mode machine vs ideal operator")
    f.add_argument("op", choices=sorted(FSM_OPS))
    f.add_argument("-k", type=int, default=4)
    f.add_argument("--cycles", type=int, default=1)
    f.add_argument("--samples", type=int, default=10_000)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--no-reset", action="store_true")
    f.add_argument("--lossy-reset", action="store_true",
                   help="min table whose reset rows drop a coincident spike")
    f.set_defaults(fn=cmd_fsm_check)

    r = sub.add_parser("run", help="run a system config")
    r.add_argument("config")
    r.add_argument("--fsm", action="store_true")
    r.add_argument("--jitter", type=int, metavar="SEED", default=None)
    r.add_argument("--trace", metavar="OUT")
    r.set_defaults(fn=cmd_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (UsageError, ParseError, UnboundVariable, NetlistError, TableError, ConfigError,
            MalformedTrace, DomainTooLarge, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
