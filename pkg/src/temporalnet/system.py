"""Gamma-synchronized systems of feedforward segments with feedback.

Every value crossing a segment boundary takes one gamma cycle: a segment
consumes what its producers emitted in the previous cycle.  Outputs of
``st`` segments are already in ``0..k-1``; outputs of ``non-st`` segments
are measured from the current reference and are re-referenced to the next
one by subtracting ``k``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .core import INF, OpKind, TValue, apply_binary, delay_finite, format_value, parse_value
from .fsm import Violation
from .network import Netlist, evaluate, parse_netlist
from .pulse import PulseNetwork
from .synthesis import parse_table, re_reference, synthesize


class ConfigError(ValueError):
    pass


@dataclass
class Segment:
    name: str
    body: Netlist
    kind: str = "st"

    def __post_init__(self):
        if self.kind not in ("st", "non-st"):
            raise ConfigError(f"segment {self.name}: kind must be 'st' or 'non-st'")
        if self.kind == "non-st" and self.body.ref is None:
            raise ConfigError(f"segment {self.name}: non-st body needs a reference input")

    @property
    def inputs(self) -> list[str]:
        return [i for i in self.body.inputs if i != self.body.ref]

    @property
    def outputs(self) -> list[str]:
        return list(self.body.outputs)


@dataclass
class JitterSpec:
    """Fixed per-element timing offsets, drawn once per run.

    Offsets are uniform in ``[-eps, eps]`` and sit on delay elements outside
    the gamma delay chain and on inter-segment wires; ``scope="all"`` also
    puts them on zero-delay logic gates.  ``offsets`` pins chosen elements
    (``"seg.wire"`` for gates, ``"->seg.line"`` for wires).
    """

    eps: float = 0.2
    seed: int = 0
    scope: str = "delays"
    offsets: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.eps < 0.5:
            raise ConfigError(f"jitter {self.eps} must be below 0.5 unit")
        if any(abs(v) >= 0.5 for v in self.offsets.values()):
            raise ConfigError("pinned offsets must be below 0.5 unit")
        if self.scope not in ("delays", "all"):
            raise ConfigError(f"unknown jitter scope {self.scope!r}")


@dataclass
class SystemConfig:
    k: int
    segments: dict[str, Segment]
    wiring: dict[str, str]  # consumer "seg.line" -> source "seg.line" or external line
    inputs: list[dict[str, TValue]] = field(default_factory=list)
    cycles: int | None = None
    initial: dict[str, TValue] = field(default_factory=dict)
    default_inputs: dict[str, TValue] = field(default_factory=dict)
    jitter: JitterSpec | None = None
    realign: str | list[str] = "outputs"

    @property
    def n_cycles(self) -> int:
        return self.cycles if self.cycles is not None else len(self.inputs)

    def external(self, cycle: int) -> dict[str, TValue]:
        vals = dict(self.default_inputs)
        if cycle < len(self.inputs):
            vals.update(self.inputs[cycle])
        return vals

    def is_segment_line(self, src: str) -> bool:
        seg, _, line = src.partition(".")
        return seg in self.segments and line in self.segments[seg].outputs


def validate_config(cfg: SystemConfig) -> list[str]:
    diags = []
    for name, seg in cfg.segments.items():
        if seg.name != name:
            diags.append(f"segment key {name!r} names segment {seg.name!r}")
        if seg.body.k != cfg.k:
            diags.append(f"segment {name}: body has k={seg.body.k}, system has k={cfg.k}")
        for line in seg.inputs:
            if f"{name}.{line}" not in cfg.wiring:
                diags.append(f"unbound line {name}.{line}")
    for dst, src in cfg.wiring.items():
        seg, _, line = dst.partition(".")
        if seg not in cfg.segments or line not in cfg.segments[seg].inputs:
            diags.append(f"wiring target {dst!r} is not a segment input")
        if "." in src and not cfg.is_segment_line(src):
            diags.append(f"wiring source {src!r} is not a segment output")
    for src in cfg.initial:
        if not cfg.is_segment_line(src):
            diags.append(f"initial value for unknown segment output {src!r}")
    for c, vols in enumerate(cfg.inputs + [cfg.default_inputs]):
        for line, v in vols.items():
            if not (v == INF or 0 <= v < cfg.k):
                diags.append(f"cycle {c}: input {line}={v} outside 0..{cfg.k - 1}")
    return diags


@dataclass
class CycleRecord:
    cycle: int
    inputs: dict[str, dict[str, TValue]]
    outputs: dict[str, TValue]
    violations: list[Violation] = field(default_factory=list)


@dataclass
class CycleTrace:
    records: list[CycleRecord] = field(default_factory=list)

    def series(self, line: str) -> list[TValue]:
        """Values seen by consumers on ``line``, one per cycle."""
        return [r.outputs[line] for r in self.records]

    @property
    def violations(self) -> list[Violation]:
        return [v for r in self.records for v in r.violations]

    def to_tsv(self) -> str:
        rows = ["cycle\tline\tvalue"]
        for r in self.records:
            for line in sorted(r.outputs):
                rows.append(f"{r.cycle}\t{line}\t{format_value(r.outputs[line])}")
        return "\n".join(rows) + "\n"


def parse_tsv(text: str) -> dict[tuple[int, str], TValue]:
    out = {}
    for raw in text.splitlines()[1:]:
        if raw.strip():
            c, line, v = raw.split("\t")
            out[(int(c), line)] = parse_value(v)
    return out


def _check(cfg: SystemConfig):
    diags = validate_config(cfg)
    if diags:
        raise ConfigError("; ".join(diags))


def _gather(cfg: SystemConfig, seg: Segment, prev: Mapping[str, TValue], ext) -> dict:
    volley = {}
    for line in seg.inputs:
        src = cfg.wiring[f"{seg.name}.{line}"]
        volley[line] = prev[src] if cfg.is_segment_line(src) else ext.get(src, INF)
    return volley


def _cross(seg: Segment, v: TValue, k: int) -> TValue:
    return re_reference(v, k) if seg.kind == "non-st" else (v if v < k else INF)


def _initial(cfg: SystemConfig) -> dict[str, TValue]:
    prev = {f"{n}.{o}": INF for n, s in cfg.segments.items() for o in s.outputs}
    prev.update(cfg.initial)
    return prev


def run_system(cfg: SystemConfig) -> CycleTrace:
    """Ideal, zero-gate-delay execution, one gamma cycle at a time."""
    _check(cfg)
    prev = _initial(cfg)
    trace = CycleTrace()
    for c in range(cfg.n_cycles):
        ext = cfg.external(c)
        cur, ins = {}, {}
        for name in sorted(cfg.segments):
            seg = cfg.segments[name]
            volley = _gather(cfg, seg, prev, ext)
            ins[name] = dict(volley)
            if seg.body.ref is not None:
                volley[seg.body.ref] = 0
            for line, v in evaluate(seg.body, volley).items():
                cur[f"{name}.{line}"] = _cross(seg, v, cfg.k)
        trace.records.append(CycleRecord(c, ins, cur))
        prev = cur
    return trace


def run_system_fsm(cfg: SystemConfig, reset: bool = True, use_tables: bool = True,
                   lossy_reset: bool = False) -> CycleTrace:
    """Same system with every gate replaced by its pulse-mode machine.

    With ``reset=False`` the gamma reset never reaches the gates, so state
    left over from one cycle leaks into the next.
    """
    _check(cfg)
    nets = {n: PulseNetwork(s.body, use_tables, lossy_reset) for n, s in cfg.segments.items()}
    prev = _initial(cfg)
    trace = CycleTrace()
    for c in range(cfg.n_cycles):
        ext = cfg.external(c)
        cur, ins, viol = {}, {}, []
        for name in sorted(cfg.segments):
            seg = cfg.segments[name]
            volley = _gather(cfg, seg, prev, ext)
            ins[name] = dict(volley)
            if seg.body.ref is not None:
                volley[seg.body.ref] = 0
            outs, v = nets[name].run_cycle(volley, reset, c, name)
            viol += v
            for line, val in outs.items():
                cur[f"{name}.{line}"] = _cross(seg, val, cfg.k)
        trace.records.append(CycleRecord(c, ins, cur, viol))
        prev = cur
    return trace


# -- jittered execution ----------------------------------------------------


def decode(x: float) -> TValue:
    """Integer model time of a drifted spike (nearest unit, halves up)."""
    return INF if x == INF else math.floor(x + 0.5)


def realign(x: float) -> TValue:
    """Realignment gate: fire on the next tick of the unit clock.

    The unit clock ticks half a unit after each model time, so any spike
    within half a unit of ``n`` is re-emitted on the tick labelled ``n``.
    """
    return INF if x == INF else math.ceil(x - 0.5)


@dataclass
class DriftReport:
    max_drift: float = 0.0
    worst: str = ""
    offsets: dict[str, float] = field(default_factory=dict)

    def note(self, where: str, drift: float):
        if abs(drift) > abs(self.max_drift):
            self.max_drift, self.worst = drift, where


def _real_binary(op: OpKind, a, b):
    """Apply ``op`` to drifted spikes ``(time, drift)``.

    Decisions use decoded model times; the output is the physical spike
    that the operator passes through.
    """
    da, db = decode(a[0]), decode(b[0])
    z = apply_binary(op, da, db)
    if z == INF:
        return (INF, 0.0)
    if da == db:
        if op is OpKind.MAX:
            return max(a, b)
        return min(a, b) if op is OpKind.MIN else a
    return a if z == da else b


def _real_eval(net: Netlist, volley: Mapping[str, tuple], offsets: Mapping[str, float],
               realigned: Iterable[str], report: DriftReport, prefix: str) -> dict:
    k = net.k
    w = dict(volley)
    realigned = set(realigned)
    for g in net.order:
        ins = [w[i] for i in g.ins]
        if isinstance(g.op, str):
            if g.op != "next":
                raise ValueError(f"block {g.op!r} has no timing model")
            x, d = ins[0]
            val = (x + k, d) if x != INF else (INF, 0.0)
        elif g.op is OpKind.DELAY:
            x, d = ins[0]
            if x == INF or delay_finite(decode(x), g.c, k) == INF:
                val = (INF, 0.0)
            else:
                off = offsets.get(g.out, 0.0)
                val = (x + g.c + off, d + off)
        elif g.op is OpKind.IDENTITY:
            val = ins[0]
        else:
            val = _real_binary(g.op, *ins)
            off = offsets.get(g.out, 0.0)
            if val[0] != INF and off:
                val = (val[0] + off, val[1] + off)
        if val[0] != INF:
            report.note(prefix + g.out, val[1])
        if g.out in realigned and val[0] != INF:
            val = (float(realign(val[0])), 0.0)
        w[g.out] = val
    return {name: w[wire] for name, wire in net.outputs.items()}


def draw_offsets(cfg: SystemConfig, spec: JitterSpec) -> dict[str, float]:
    """Fixed offsets for every jittered element, keyed as in :class:`JitterSpec`."""
    rng = random.Random(spec.seed)
    offsets = {}
    for name in sorted(cfg.segments):
        net = cfg.segments[name].body
        for g in net.gates:
            if g.out in net.clock_wires or g.op == "next":
                continue
            if g.op is OpKind.DELAY or spec.scope == "all":
                offsets[f"{name}.{g.out}"] = rng.uniform(-spec.eps, spec.eps)
    for dst in sorted(cfg.wiring):
        if cfg.is_segment_line(cfg.wiring[dst]):
            offsets[f"->{dst}"] = rng.uniform(-spec.eps, spec.eps)
    offsets.update(spec.offsets)
    return offsets


def run_with_jitter(cfg: SystemConfig, jitter: JitterSpec | None = None,
                    realign_at: str | Sequence[str] | None = None) -> tuple[CycleTrace, DriftReport]:
    """Run with drifting spike times and optional realignment gates.

    ``realign_at`` is ``"outputs"`` (every segment output), ``"none"``, or a
    list of ``"seg.wire"`` names, which may include internal wires.  The
    trace holds decoded integer values; without realignment the drifted
    spikes themselves travel on to the next cycle.
    """
    _check(cfg)
    jitter = jitter or cfg.jitter or JitterSpec(eps=0.0)
    where = realign_at if realign_at is not None else cfg.realign
    offsets = draw_offsets(cfg, jitter)
    report = DriftReport(offsets=offsets)
    k = cfg.k
    prev = {line: (float(v) if v != INF else INF, 0.0) for line, v in _initial(cfg).items()}
    trace = CycleTrace()
    for c in range(cfg.n_cycles):
        ext = cfg.external(c)
        cur, shown, ins = {}, {}, {}
        for name in sorted(cfg.segments):
            seg = cfg.segments[name]
            net = seg.body
            volley, plain = {}, {}
            for line in seg.inputs:
                dst = f"{name}.{line}"
                src = cfg.wiring[dst]
                if cfg.is_segment_line(src):
                    x, d = prev[src]
                    off = offsets.get(f"->{dst}", 0.0)
                    volley[line] = (x + off, d + off) if x != INF else (INF, 0.0)
                else:
                    v = ext.get(src, INF)
                    volley[line] = (float(v) if v != INF else INF, 0.0)
                plain[line] = decode(volley[line][0])
            ins[name] = plain
            if net.ref is not None:
                volley[net.ref] = (0.0, 0.0)
            if where == "outputs":
                marks = [net.outputs[o] for o in net.outputs]
            elif where == "none":
                marks = []
            else:
                marks = [s.partition(".")[2] for s in where if s.partition(".")[0] == name]
            local = {g.partition(".")[2]: v for g, v in offsets.items()
                     if g.partition(".")[0] == name and not g.startswith("->")}
            outs = _real_eval(net, volley, local, marks, report, f"{name}.")
            for line, (x, d) in outs.items():
                key = f"{name}.{line}"
                if x == INF:
                    cur[key] = (INF, 0.0)
                    shown[key] = INF
                    continue
                if seg.kind == "non-st":
                    x = x - k if k <= decode(x) < 2 * k else INF
                elif decode(x) >= k:
                    x = INF
                cur[key] = (x, d) if x != INF else (INF, 0.0)
                shown[key] = decode(x)
        trace.records.append(CycleRecord(c, ins, shown))
        prev = cur
    return trace, report


# -- config files -----------------------------------------------------------


def _value_map(text: str) -> dict[str, TValue]:
    out: dict[str, TValue] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, v = item.partition("=")
        if not sep:
            raise ConfigError(f"expected <line>=<value>, got {item!r}")
        name = name.strip()
        if name in out:
            raise ConfigError(f"line {name!r} spikes twice in one cycle")
        out[name] = parse_value(v)
    return out


def load_segment(name: str, kind: str, source: str, path: Path, k: int | None = None) -> Segment:
    text = path.read_text(encoding="utf-8")
    if source == "table":
        net = synthesize(parse_table(text)).to_netlist()
        if kind != "non-st":
            raise ConfigError(f"segment {name}: a table segment is non-st")
    elif source == "netlist":
        net = parse_netlist(text)
    else:
        raise ConfigError(f"segment {name}: source must be 'table' or 'netlist'")
    return Segment(name, net, kind)


def parse_config(text: str, base: Path | str = ".") -> SystemConfig:
    """Read a system description.

    Top-level ``key = value`` lines set ``k``, ``cycles`` and ``realign``.
    Sections: ``[segments]`` (``name = st|non-st table|netlist <path>``),
    ``[wiring]`` (``producer.line -> consumer.line``; a bare producer is an
    external input), ``[initial]`` (``seg.line = value``), ``[inputs]``
    (``<cycle>: line=value, ...``; ``*`` for every cycle), ``[jitter]``
    (``eps``, ``seed``, ``scope``, and ``seg.wire`` pinned offsets).
    """
    base = Path(base)
    k = cycles = None
    realign_at: str | list[str] = "outputs"
    section = None
    segments: dict[str, Segment] = {}
    wiring: dict[str, str] = {}
    initial: dict[str, TValue] = {}
    inputs: dict[int, dict[str, TValue]] = {}
    default: dict[str, TValue] = {}
    jitter: dict[str, str] = {}
    pinned: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if section not in ("segments", "wiring", "initial", "inputs", "jitter", "realign"):
                    raise ConfigError(f"unknown section [{section}]")
            elif section is None or (section != "realign" and "=" in line and section is None):
                key, _, v = line.partition("=")
                key, v = key.strip(), v.strip()
                if key == "k":
                    k = int(v)
                elif key == "cycles":
                    cycles = int(v)
                elif key == "realign":
                    realign_at = v if v in ("outputs", "none") else [s.strip() for s in v.split(",")]
                else:
                    raise ConfigError(f"unknown setting {key!r}")
            elif section == "segments":
                name, _, rest = line.partition("=")
                parts = rest.split()
                if len(parts) != 3:
                    raise ConfigError("expected '<name> = <kind> <table|netlist> <path>'")
                kind, source, rel = parts
                name = name.strip()
                segments[name] = load_segment(name, kind, source, base / rel)
            elif section == "wiring":
                src, sep, dst = line.partition("->")
                if not sep:
                    raise ConfigError("expected '<producer> -> <consumer>'")
                if dst.strip() in wiring:
                    raise ConfigError(f"{dst.strip()} is wired twice")
                wiring[dst.strip()] = src.strip()
            elif section == "initial":
                initial.update(_value_map(line))
            elif section == "inputs":
                cyc, sep, rest = line.partition(":")
                if not sep:
                    raise ConfigError("expected '<cycle>: line=value, ...'")
                vals = _value_map(rest)
                if cyc.strip() == "*":
                    default.update(vals)
                else:
                    n = int(cyc)
                    if n in inputs:
                        raise ConfigError(f"cycle {n} listed twice")
                    inputs[n] = vals
            elif section == "jitter":
                key, _, v = line.partition("=")
                key, v = key.strip(), v.strip()
                if key in ("eps", "seed", "scope"):
                    jitter[key] = v
                else:
                    pinned[key] = float(v)
            elif section == "realign":
                realign_at = line if line in ("outputs", "none") else [s.strip() for s in line.split(",")]
        except ConfigError as err:
            raise ConfigError(f"line {lineno}: {err}") from None
        except ValueError as err:
            raise ConfigError(f"line {lineno}: {err}") from None
    if k is None:
        raise ConfigError("missing 'k = <int>' setting")
    n_listed = max(inputs) + 1 if inputs else 0
    schedule = [inputs.get(c, {}) for c in range(n_listed)]
    spec = None
    if jitter or pinned:
        spec = JitterSpec(float(jitter.get("eps", 0.2)), int(jitter.get("seed", 0)),
                          jitter.get("scope", "delays"), pinned)
    cfg = SystemConfig(k, segments, wiring, schedule, cycles, initial, default, spec, realign_at)
    _check(cfg)
    return cfg


def load_config(path: str | Path) -> SystemConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), path.parent)


# -- generated systems --------------------------------------------------------


def random_system(rng: random.Random, k: int = 4, n_cycles: int = 4, n_gates: int = 6,
                  p_inf: float = 0.2) -> SystemConfig:
    """Two st segments in a loop, each also driven by one external line.

    Every path inside a segment passes through at most one delay element, so
    per-element jitter below 0.25 never accumulates past half a unit
    between realignment points.
    """
    from .network import random_netlist

    a = random_netlist(rng, k, 2, n_gates, n_outputs=1, max_delays_per_path=1)
    b = random_netlist(rng, k, 2, n_gates, n_outputs=1, max_delays_per_path=1)
    segs = {"a": Segment("a", a, "st"), "b": Segment("b", b, "st")}
    wiring = {"a.x0": "X", "a.x1": "b.y0", "b.x0": "a.y0", "b.x1": "Y"}

    def draw():
        return INF if rng.random() < p_inf else rng.randrange(k)

    schedule = [{"X": draw(), "Y": draw()} for _ in range(n_cycles)]
    initial = {"b.y0": draw()}
    return SystemConfig(k, segs, wiring, schedule, n_cycles, initial)


def delay_chain_config(k: int = 8, depth: int = 6, value: int = 0, cycles: int = 1) -> SystemConfig:
    """One st segment holding ``depth`` unit delays in series."""
    from .network import Gate

    gates, prev = [], "x"
    for i in range(depth):
        gates.append(Gate(f"d{i}", OpKind.DELAY, (prev,), 1))
        prev = f"d{i}"
    net = Netlist(k, ["x"], {"y": prev}, gates)
    return SystemConfig(k, {"chain": Segment("chain", net, "st")}, {"chain.x": "X"},
                        [{"X": value}] * cycles, cycles)
