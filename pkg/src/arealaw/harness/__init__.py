"""Configuration, ensemble runs and result files."""

from .config import ConfigError, ExperimentConfig, load, parse
from .experiments import (
    AllRejected,
    EnsembleResult,
    fit_decay,
    plateau_check,
    run_area_law,
    run_correlator,
    run_thermal_sweep,
    write_outputs,
)
from .selfcheck import run_selfcheck

__all__ = [
    "AllRejected",
    "ConfigError",
    "EnsembleResult",
    "ExperimentConfig",
    "fit_decay",
    "load",
    "parse",
    "plateau_check",
    "run_area_law",
    "run_correlator",
    "run_selfcheck",
    "run_thermal_sweep",
    "write_outputs",
]
