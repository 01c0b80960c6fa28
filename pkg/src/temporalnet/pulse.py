"""Gate-level pulse-mode simulation of a whole netlist."""

from __future__ import annotations

from .core import INF, OpKind, TValue
from .fsm import DelayGate, Violation, gate_model
from .network import Netlist


class PulseNetwork:
    """Every gate of ``netlist`` replaced by its pulse-mode model.

    A cycle is simulated as a window of ``k`` unit steps, or ``2k`` when the
    netlist produces next-cycle values.  Gates fed by next-cycle taps only
    see the reset at the start of the window; all others are reset again at
    step ``k`` by the following gamma spike.
    """

    def __init__(self, netlist: Netlist, use_tables: bool = True, lossy_reset: bool = False):
        self.netlist = netlist
        self.k = k = netlist.k
        self.gates = netlist.order
        self.models = {g.out: gate_model(g.op, g.c, k, use_tables, lossy_reset) for g in self.gates}
        self.window = 2 * k if netlist.has_caps else k
        late = set()
        for g in self.gates:
            if g.op == "next" or any(w in late for w in g.ins):
                late.add(g.out)
        self.late = {g.out for g in self.gates
                     if g.out in late and g.op != "next" and g.op is not OpKind.DELAY}
        self.started = False

    def run_cycle(self, volley, reset: bool = True, cycle: int = 0,
                  name: str = "") -> tuple[dict[str, TValue], list[Violation]]:
        k, window = self.k, self.window
        if self.started and not reset:
            for m in self.models.values():
                m.rebase(window)
        self.started = True
        spikes: dict[str, set[int]] = {}
        for line in self.netlist.inputs:
            v = volley[line]
            if v != INF:
                if not (isinstance(v, int) or float(v).is_integer()) or not 0 <= v < k:
                    raise ValueError(f"input {line}={v} is not a spike time in 0..{k - 1}")
                spikes.setdefault(line, set()).add(int(v))
        violations = []
        counts: dict[tuple[str, int, int], int] = {}
        prefix = f"{name}." if name else ""
        for t in range(window):
            for g in self.gates:
                model = self.models[g.out]
                ins = tuple(t in spikes.get(w, ()) for w in g.ins)
                if reset and (t == 0 or (t == k and g.out not in self.late)):
                    r = True
                else:
                    r = False
                outs, bad = model.step(t, ins, r)
                epoch = 0 if g.out in self.late else t // k
                dup = False
                for j, s in enumerate(ins):
                    if s:
                        key = (g.out, j, epoch)
                        counts[key] = counts.get(key, 0) + 1
                        dup |= counts[key] > 1
                if bad or dup:
                    violations.append(Violation(prefix + g.out, cycle, t))
                for o in outs:
                    if isinstance(model, DelayGate) and o >= k:
                        continue
                    spikes.setdefault(g.out, set()).add(o)
        out = {}
        for name_, wire in self.netlist.outputs.items():
            times = [s for s in spikes.get(wire, ()) if s < window]
            out[name_] = min(times) if times else INF
        return out, violations
