"""Spike-time values and the ten 2-ary operators.

A value is the time of a spike inside a gamma window of k units; a line
that never spikes carries inf.  Run: python3 demos/01_operators.py
"""

from temporalnet import INF, OpKind, apply_binary, delay_finite, domain, parse, evaluate
from temporalnet.core import check_finite_invariance, format_value

k = 4
print("values in S_4:", [format_value(v) for v in domain(k)])

# each operator passes one input through, or stays silent
print("\n      a<b  a=b  b<a   (a=1/2, b=2/1)")
for op in OpKind:
    if op.arity != 2:
        continue
    row = [apply_binary(op, 1, 2), apply_binary(op, 2, 2), apply_binary(op, 2, 1)]
    print(f"{op.value:>5}  " + "  ".join(f"{format_value(v):>3}" for v in row))

# a unit delay saturates at the end of the window
print("\ndelay by one:", {a: format_value(delay_finite(a, 1, k)) for a in range(k)})

# every operator is invariant: shift both inputs and the output shifts too
for op in (OpKind.LT, OpKind.XMAX):
    r = check_finite_invariance(lambda a, b: apply_binary(op, a, b), k)
    print(f"{op.value} invariant over {r.checked} input pairs: {bool(r)}")

# the expression language: integers are taps on the reference chain
e = parse("A==0 | B==0 | 4   # fires at 4 when both spike at 0")
print("\n", e, "->", evaluate(e, {"A": 0, "B": 0}, k))
print(" a & b with a silent ->", evaluate(parse("a & b"), {"a": INF, "b": 3}, k))
print(" a+1 at the last tick ->", format_value(evaluate(parse("a+1"), {"a": 3}, k)))
