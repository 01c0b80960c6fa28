"""Gates as pulse-mode state machines reset by the gamma clock.

Run: python3 demos/03_pulse_mode_gates.py
"""

from temporalnet import INF, OpKind, builtin_fsm, check_equivalence, run_fsm
from temporalnet.fsm import format_trace, parse_trace

print(builtin_fsm("max").table())

trace = parse_trace("cycle 0: a@1, b@3\ncycle 1: b@0\ncycle 2: a@2, b@2")
print("\ninput trace:\n" + format_trace(trace), end="")
run = run_fsm(builtin_fsm("max"), trace, k=4, n_cycles=3)
print("max per cycle:", run.values(3), "states at cycle end:", run.end_states)

# exhaustive single-cycle checks, then random three-cycle runs
for kind, op in [("delay", OpKind.DELAY), ("min", OpKind.MIN), ("max", OpKind.MAX)]:
    one = all(check_equivalence(builtin_fsm(kind), op, k) for k in (2, 4, 8))
    many = check_equivalence(builtin_fsm(kind), op, 4, n_cycles=3, samples=2000)
    print(f"{kind:>5}: single cycle {one}, three cycles {bool(many)}")

# a max gate that saw only one input keeps that in its state; only the reset clears it
seq = [[(1, INF), (2, 3)]]
print("\nwith resets:   ", bool(check_equivalence(builtin_fsm("max"), OpKind.MAX, 4, sequences=seq)))
r = check_equivalence(builtin_fsm("max"), OpKind.MAX, 4, sequences=seq, reset=False)
print("without resets:", bool(r), "->", r.detail)

# the min table as drawn drops a spike that coincides with the reset after a Y1 cycle
r = check_equivalence(builtin_fsm("min", lossy_reset=True), OpKind.MIN, 4, sequences=[[(2, INF), (0, INF)]])
print("min table as drawn:", r.detail)

# a second spike on one line is reported, never a silent undefined move
bad = run_fsm(builtin_fsm("delay"), parse_trace("cycle 0: a@1, a@2"), 4, 1)
print("double spike:", [str(v) for v in bad.violations])
