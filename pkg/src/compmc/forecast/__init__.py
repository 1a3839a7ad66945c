"""Deterministic forecasters and their selection."""

from .bfgs import BfgsConfig, BfgsResult, BfgsState, bfgs_minimize, inv_hessian_update, numeric_gradient
from .grooms import DEFAULT_CANDIDATES, Candidate, Selection, fit_candidate, forecast_series, grooms_select
from .horizon import ForecastResult, predict_horizon, predict_horizon_joint
from .io import load_model, model_from_dict, model_to_dict, save_model
from .linear import LinearModel, fit_linear
from .metrics import rmse, rmse_log_median
from .pnn import Neuron, PnnModel, fit_pnn

__all__ = [
    "BfgsConfig", "BfgsResult", "BfgsState", "bfgs_minimize", "inv_hessian_update",
    "numeric_gradient", "DEFAULT_CANDIDATES", "Candidate", "Selection", "fit_candidate", "forecast_series",
    "grooms_select", "ForecastResult", "predict_horizon", "predict_horizon_joint",
    "load_model", "model_from_dict", "model_to_dict", "save_model", "LinearModel",
    "fit_linear", "rmse", "rmse_log_median", "Neuron", "PnnModel", "fit_pnn",
]
