"""Multi-stage TCAM routing table compaction and power model."""

from ._core import (
    Engine,
    Error,
    MinimizedTable,
    RoutingTable,
    TernaryCube,
    compact,
    eliminate_overlaps,
    eps_max,
    equal_split_configs,
    generate_table,
    generate_trace,
    meps,
    minimization_pof,
    pof,
    run_cli,
    total_pof,
    try_merge,
)

__all__ = [
    "Engine",
    "Error",
    "MinimizedTable",
    "RoutingTable",
    "TernaryCube",
    "compact",
    "eliminate_overlaps",
    "eps_max",
    "equal_split_configs",
    "generate_table",
    "generate_trace",
    "meps",
    "minimization_pof",
    "pof",
    "run_cli",
    "total_pof",
    "try_merge",
]
