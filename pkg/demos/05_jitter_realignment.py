"""Drifting spike times and unit-clock realignment.

Each delay element and inter-segment wire gets a fixed timing offset.
Realignment snaps a spike back onto the unit clock, which works as long
as the drift between realignment points stays under half a unit.
Run: python3 demos/05_jitter_realignment.py
"""

import random

from temporalnet import JitterSpec, Netlist, OpKind, Segment, SystemConfig, run_system, run_with_jitter
from temporalnet.network import Gate
from temporalnet.system import delay_chain_config, random_system

# six unit delays, each 0.2 slow: the output drifts past half a unit
chain = delay_chain_config(k=8, depth=6)
slow = JitterSpec(0.2, offsets={f"chain.d{i}": 0.2 for i in range(6)})
print("ideal chain output:", run_system(chain).series("chain.y"))
out, rep = run_with_jitter(chain, slow, "none")
print(f"no realignment:     {out.series('chain.y')} (drift {rep.max_drift:.1f})")
out, _ = run_with_jitter(chain, slow, ["chain.d1", "chain.d3", "chain.d5"])
print("realign every two:  ", out.series("chain.y"))

# a loop through a slow wire drifts a little more each cycle
body = Netlist(8, ["x"], {"y": "y"}, [Gate("y", OpKind.IDENTITY, ("x",))])
loop = SystemConfig(8, {"s": Segment("s", body)}, {"s.x": "s.y"}, [], 8, {"s.y": 3})
wire = JitterSpec(0.3, offsets={"->s.x": 0.3})
print("\nloop, ideal:      ", run_system(loop).series("s.y"))
print("loop, realigned:  ", run_with_jitter(loop, wire, "outputs")[0].series("s.y"))
print("loop, free-running:", run_with_jitter(loop, wire, "none")[0].series("s.y"))

# random two-segment loops with at most one delay per path: always restored
same = 0
for seed in range(100):
    cfg = random_system(random.Random(seed))
    same += run_with_jitter(cfg, JitterSpec(0.2, seed))[0].to_tsv() == run_system(cfg).to_tsv()
print(f"\nrandom systems restored by realignment: {same}/100")
