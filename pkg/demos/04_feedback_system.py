"""A segment that feeds its own sum back: a running total.

The adder's S output returns to its A input one gamma cycle later, and B
spikes at 1 every cycle.  Run: python3 demos/04_feedback_system.py
"""

from pathlib import Path

from temporalnet import load_config, run_system, run_system_fsm, run_with_jitter

cfg_path = Path(__file__).resolve().parent.parent / "tests" / "data" / "running_sum.cfg"
print(cfg_path.read_text())

cfg = load_config(cfg_path)
cfg.cycles = 6
ideal = run_system(cfg)
print("ideal S' :", ideal.series("adder.S"))
print("ideal C' :", ideal.series("adder.Cout"))

# every gate replaced by its pulse-mode machine: same trace
fsm = run_system_fsm(cfg)
print("pulse-mode trace identical:", fsm.to_tsv() == ideal.to_tsv())

# timing jitter on the wires, cleaned up by realignment at the segment outputs
jit, report = run_with_jitter(cfg)
print(f"jittered trace identical: {jit.to_tsv() == ideal.to_tsv()} "
      f"(largest drift {report.max_drift:+.3f} at {report.worst})")

# without resets the gates carry state across cycles
leaky = run_system_fsm(cfg, reset=False)
print("no-reset S':", leaky.series("adder.S"))
print()
print(ideal.to_tsv(), end="")
