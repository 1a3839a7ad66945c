"""Composite Monte Carlo engine."""

from .config import load_config, parse_binding, parse_config
from .engine import (
    DEFAULT_LEVELS,
    MODELS,
    Deterministic,
    InputBinding,
    ModelDef,
    SimulationSpec,
    Stochastic,
    TrialMatrix,
    constant,
    register_model,
    run_simulation,
    simulate_trials,
)
from .sensitivity import SensitivityEntry, aggregate_by_variable, sensitivity_chart, spearman
from .summary import OutcomeSummary, certainty_interval, nearest_rank, summarize

__all__ = [
    "load_config", "parse_binding", "parse_config", "DEFAULT_LEVELS", "MODELS", "Deterministic",
    "InputBinding", "ModelDef", "SimulationSpec", "Stochastic", "TrialMatrix", "constant",
    "register_model", "run_simulation", "simulate_trials", "SensitivityEntry",
    "aggregate_by_variable", "sensitivity_chart", "spearman", "OutcomeSummary",
    "certainty_interval", "nearest_rank", "summarize",
]
