"""From a function table to a gate netlist: the quaternary half adder.

Run: python3 demos/02_half_adder_synthesis.py
"""

from temporalnet import adder_table, check_st_axioms, equality_combine, minimize, table_to_minterms
from temporalnet.expr import parse
from temporalnet.network import evaluate

table = adder_table(4)
print(table.to_text())

# one minterm per row; outputs come out one gamma period late (R-referenced)
raw = table_to_minterms(table)
print("minterm form, cost:", raw.cost())
print("Cout meta implicants:", {cap: len(m) for cap, m in raw.outputs["Cout"].items()})

# merging neighbouring intervals shrinks the carry to four implicants plus a constant
small = minimize(raw)
print("\nminimized:")
print(small.equations())
print("cost:", small.cost())

# the four A==B rows of S share one comparator after equality combining
diag = [parse(f"A=={c} | B=={c} | {m}") for c, m in [(0, 4), (1, 6), (2, 4), (3, 6)]]
r = equality_combine({"S": diag})
print("diagonal of S:", r.exprs["S"])
print(f"  before: {r.before}\n  after:  {r.after}")

# lower onto gates: a delay chain from R supplies every constant
net = small.to_netlist()
print(f"\nnetlist: {len(net.gates)} gates, {len(net.logic_gates)} outside the clock chain")
print("3 + 3 ->", evaluate(net, {"R": 0, "A": 3, "B": 3}), "(next cycle sees S=2, Cout=1)")
print("axioms hold:", bool(check_st_axioms(net)))
