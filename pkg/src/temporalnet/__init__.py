"""Space-time (race logic) computing: values are spike times within a gamma cycle."""

from .core import INF, OpKind, apply_binary, delay_finite, domain
from .expr import evaluate, format_expr, gate_cost, parse
from .fsm import builtin_fsm, check_equivalence, run_fsm
from .network import Netlist, check_st_axioms, evaluate as evaluate_netlist, parse_netlist
from .synthesis import (FunctionTable, adder_table, equality_combine, minimize, parse_table,
                        synthesize, table_to_minterms)
from .system import (JitterSpec, Segment, SystemConfig, load_config, run_system,
                     run_system_fsm, run_with_jitter)

__all__ = [
    "INF", "OpKind", "apply_binary", "delay_finite", "domain",
    "evaluate", "format_expr", "gate_cost", "parse",
    "builtin_fsm", "check_equivalence", "run_fsm",
    "Netlist", "check_st_axioms", "evaluate_netlist", "parse_netlist",
    "FunctionTable", "adder_table", "equality_combine", "minimize", "parse_table",
    "synthesize", "table_to_minterms",
    "JitterSpec", "Segment", "SystemConfig", "load_config", "run_system",
    "run_system_fsm", "run_with_jitter",
]
