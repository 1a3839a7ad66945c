"""JSON round-trip for fitted forecasters.

Floats are written with Python's shortest round-trip repr, so a reloaded
model predicts bit-identically.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import ConfigError
from .linear import LinearModel
from .pnn import Neuron, PnnModel


def model_to_dict(model) -> dict:
    if isinstance(model, PnnModel):
        return {
            "kind": "pnn",
            "feature_names": list(model.feature_names),
            "x_offset": list(model.x_offset),
            "x_scale": list(model.x_scale),
            "y_offset": model.y_offset,
            "y_scale": model.y_scale,
            "layers": [
                {"layer": n.layer, "inputs": list(n.inputs), "coefficients": list(n.coefficients)}
                for n in model.neurons
            ],
            "output_node": model.output_node,
            "node_bounds": [list(b) for b in model.node_bounds],
            "validation_error_trace": list(model.validation_error_trace),
            "training_rmse": model.training_rmse,
        }
    if isinstance(model, LinearModel):
        return {
            "kind": "linear",
            "feature_names": list(model.feature_names),
            "intercept": model.intercept,
            "slopes": list(model.slopes),
            "training_rmse": model.training_rmse,
        }
    raise ConfigError(f"cannot serialise {type(model).__name__}")


def model_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "pnn":
        return PnnModel(
            feature_names=tuple(doc["feature_names"]),
            x_offset=tuple(doc["x_offset"]),
            x_scale=tuple(doc["x_scale"]),
            y_offset=doc["y_offset"],
            y_scale=doc["y_scale"],
            neurons=tuple(
                Neuron(tuple(n["inputs"]), tuple(n["coefficients"]), n["layer"])
                for n in doc["layers"]
            ),
            output_node=doc["output_node"],
            node_bounds=tuple(tuple(b) for b in doc["node_bounds"]),
            validation_error_trace=tuple(doc["validation_error_trace"]),
            training_rmse=doc["training_rmse"],
        )
    if kind == "linear":
        return LinearModel(
            tuple(doc["feature_names"]), doc["intercept"], tuple(doc["slopes"]), doc["training_rmse"]
        )
    raise ConfigError(f"unknown model kind {kind!r}")


def save_model(model, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path):
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
