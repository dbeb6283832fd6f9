"""Batch front end: scenario files in, JSON reports and CSV tables out."""

from blowup_reduction.cli_harness.config import (
    SCENARIO_KINDS,
    ConfigError,
    ScenarioConfig,
    defaults_for,
    expand_grid,
    load_config,
    resolve_output_dir,
    validate,
)
from blowup_reduction.cli_harness.runner import (
    CheckRecord,
    RunReport,
    emit_expansion_surface,
    run_scenario,
    write_report,
)

__all__ = [
    "SCENARIO_KINDS",
    "CheckRecord",
    "ConfigError",
    "RunReport",
    "ScenarioConfig",
    "defaults_for",
    "emit_expansion_surface",
    "expand_grid",
    "load_config",
    "resolve_output_dir",
    "run_scenario",
    "validate",
    "write_report",
]
