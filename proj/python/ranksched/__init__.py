"""Load-proportional CPU allocation and CFS bandwidth simulation.

Exact arithmetic crosses the boundary as fractions.Fraction; structured
inputs and outputs are plain dicts and lists; scenario, result, patch-plan
and phase-schedule documents travel as JSON text in the same schema the CLI
uses.
"""

from ._ranksched import (
    DEFAULT_PERIOD_USEC,
    DEFAULT_SYNC_DELAY_USEC,
    SimulationError,
    ValidationError,
    __version__,
    allocate_cpu,
    apportion_cells,
    cell_fractions,
    cpu_core_seconds,
    emit_decomposition_report,
    emit_manifest,
    emit_processor_weights,
    fair_share,
    format_millicores,
    ingest_decomposition_report,
    packing_headroom,
    parse_manifest,
    parse_millicores,
    patch_script,
    plan_from_schedule,
    quota_for_limit,
    resource_efficiency,
    simulate,
    speedup,
    throttle_oracle,
)

__all__ = [
    "DEFAULT_PERIOD_USEC",
    "DEFAULT_SYNC_DELAY_USEC",
    "SimulationError",
    "ValidationError",
    "__version__",
    "allocate_cpu",
    "apportion_cells",
    "cell_fractions",
    "cpu_core_seconds",
    "emit_decomposition_report",
    "emit_manifest",
    "emit_processor_weights",
    "fair_share",
    "format_millicores",
    "ingest_decomposition_report",
    "packing_headroom",
    "parse_manifest",
    "parse_millicores",
    "patch_script",
    "plan_from_schedule",
    "quota_for_limit",
    "resource_efficiency",
    "simulate",
    "speedup",
    "throttle_oracle",
]
