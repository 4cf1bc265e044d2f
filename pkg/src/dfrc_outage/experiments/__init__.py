from .config import ConfigError, ScenarioConfig, SweepSpec
from .runner import (
    ScenarioResult, SweepTable, beampattern_rows, draw_channels, emit_beampattern, run_scenario,
    run_sweep, run_trial, validate_outage,
)

__all__ = [
    "ConfigError", "ScenarioConfig", "ScenarioResult", "SweepSpec", "SweepTable",
    "beampattern_rows", "draw_channels", "emit_beampattern", "run_scenario", "run_sweep",
    "run_trial", "validate_outage",
]
