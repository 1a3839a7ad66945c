"""Self-organising polynomial network (GMDH style).

Every neuron is the bivariate quadratic partial description

    y = e0 + e1*a + e2*b + e3*a*b + e4*a**2 + e5*b**2

over two inputs ``a`` and ``b`` drawn from the original features or from
neurons of earlier layers. Layers grow while the best validation error keeps
falling.

Every node (feature or neuron) is clipped to the range it spanned on the
training rows. Quadratic neurons fed back into themselves by recursive
forecasting otherwise run away geometrically.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ConfigError, FitError, UnderdeterminedError
from ..ingest import SupervisedDataset
from .bfgs import BfgsConfig, bfgs_minimize

logger = logging.getLogger(__name__)

N_COEF = 6


def design(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones_like(a), a, b, a * b, a * a, b * b])


@dataclass(frozen=True)
class Neuron:
    inputs: tuple[int, int]
    coefficients: tuple[float, ...]
    layer: int

    def __call__(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return design(a, b) @ np.asarray(self.coefficients)


@dataclass(frozen=True)
class PnnModel:
    """Fitted network.

    Node ``k < n_features`` is standardised feature ``k``; node
    ``n_features + m`` is the output of ``neurons[m]``. Neurons are stored in
    feed-forward order, so one pass evaluates the network.
    """

    feature_names: tuple[str, ...]
    x_offset: tuple[float, ...]
    x_scale: tuple[float, ...]
    y_offset: float
    y_scale: float
    neurons: tuple[Neuron, ...]
    output_node: int
    node_bounds: tuple[tuple[float, float], ...]
    validation_error_trace: tuple[float, ...] = ()
    training_rmse: float = math.nan

    kind = "pnn"

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def n_layers(self) -> int:
        return max((n.layer for n in self.neurons), default=0)

    def _nodes(self, X: np.ndarray) -> list[np.ndarray]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Z = (X - np.asarray(self.x_offset)) / np.asarray(self.x_scale)
        b = self.node_bounds
        nodes = [np.clip(Z[:, k], *b[k]) for k in range(self.n_features)]
        for m, neuron in enumerate(self.neurons):
            i, j = neuron.inputs
            nodes.append(np.clip(neuron(nodes[i], nodes[j]), *b[self.n_features + m]))
        return nodes

    def predict(self, X) -> np.ndarray:
        out = self._nodes(X)[self.output_node]
        return self.y_offset + self.y_scale * out


def _standardise(v: np.ndarray) -> tuple[float, float]:
    mu = float(v.mean())
    sd = float(v.std())
    return mu, (sd if sd > 0.0 else 1.0)


def _fit_neuron(a, b, y, refine: bool, bfgs_config: BfgsConfig | None) -> np.ndarray:
    Phi = design(a, b)
    coef, *_ = np.linalg.lstsq(Phi, y, rcond=None)
    if not refine:
        return coef
    n = y.shape[0]

    def sse(c):
        r = Phi @ c - y
        return float(r @ r) / n

    def sse_grad(c):
        return (2.0 / n) * (Phi.T @ (Phi @ c - y))

    res = bfgs_minimize(sse, coef, sse_grad, bfgs_config or BfgsConfig(max_iter=50, grad_tol=1e-10))
    return res.x if res.fun <= sse(coef) else coef


def _rmse(pred: np.ndarray, y: np.ndarray) -> float:
    return float(np.sqrt(np.mean((pred - y) ** 2)))


@dataclass
class _Candidate:
    inputs: tuple[int, int]
    coef: np.ndarray
    train_out: np.ndarray
    val_out: np.ndarray
    val_err: float
    layer: int
    bounds: tuple[float, float] = (-math.inf, math.inf)


def fit_pnn(
    train: SupervisedDataset,
    validation: SupervisedDataset,
    max_layers: int = 4,
    neurons_per_layer: int | None = None,
    survivor_count: int = 4,
    refine: bool = True,
    bfgs_config: BfgsConfig | None = None,
) -> PnnModel:
    """Grow a polynomial network on ``train`` using ``validation`` to stop.

    Per layer every admissible input pair is fitted (least squares, then
    BFGS refinement of the squared error), the ``survivor_count`` best by
    validation RMSE are kept, and a layer is accepted only if it lowers the
    best validation RMSE. ``neurons_per_layer`` caps the number of pairs
    tried per layer (``None`` tries all).
    """
    if tuple(train.feature_names) != tuple(validation.feature_names):
        raise ConfigError("train and validation must share feature_names")
    if len(validation) == 0:
        raise ConfigError("validation set is empty")
    if len(train) < N_COEF:
        raise UnderdeterminedError(
            f"{len(train)} training rows cannot determine {N_COEF} neuron coefficients"
        )
    if max_layers < 1 or survivor_count < 1:
        raise ConfigError("max_layers and survivor_count must be >= 1")

    k = len(train.feature_names)
    x_off, x_sc = zip(*(_standardise(train.X[:, j]) for j in range(k)))
    y_off, y_sc = _standardise(train.y)
    Zt = (train.X - np.asarray(x_off)) / np.asarray(x_sc)
    Zv = (validation.X - np.asarray(x_off)) / np.asarray(x_sc)
    yt = (train.y - y_off) / y_sc
    yv_raw = validation.y

    bounds = [(float(Zt[:, j].min()), float(Zt[:, j].max())) for j in range(k)]
    train_nodes = [Zt[:, j] for j in range(k)]
    val_nodes = [np.clip(Zv[:, j], *bounds[j]) for j in range(k)]
    # node ids of every candidate, in creation order
    created: list[_Candidate] = []
    pool = list(range(k))
    accepted_layers: list[list[int]] = []
    trace: list[float] = []

    for layer in range(1, max_layers + 1):
        if len(pool) == 1:
            pairs = [(pool[0], pool[0])]
        else:
            pairs = [
                (i, j)
                for i, j in itertools.combinations(pool, 2)
                if layer == 1 or i >= k or j >= k
            ]
        if neurons_per_layer is not None:
            pairs = pairs[:neurons_per_layer]
        if not pairs:
            break

        layer_cands = []
        for i, j in pairs:
            coef = _fit_neuron(train_nodes[i], train_nodes[j], yt, refine, bfgs_config)
            t_out = design(train_nodes[i], train_nodes[j]) @ coef
            lo, hi = float(t_out.min()), float(t_out.max())
            v_out = np.clip(design(val_nodes[i], val_nodes[j]) @ coef, lo, hi)
            err = _rmse(y_off + y_sc * v_out, yv_raw)
            if not math.isfinite(err):
                continue
            layer_cands.append(_Candidate((i, j), coef, t_out, v_out, err, layer, (lo, hi)))
        if not layer_cands:
            break
        order = sorted(range(len(layer_cands)), key=lambda c: layer_cands[c].val_err)
        survivors = [layer_cands[c] for c in order[:survivor_count]]
        best = survivors[0].val_err
        if trace and not best < trace[-1]:
            logger.debug("layer %d gives no validation gain (%g >= %g); stop", layer, best, trace[-1])
            break

        ids = []
        for cand in survivors:
            node_id = k + len(created)
            created.append(cand)
            train_nodes.append(cand.train_out)
            val_nodes.append(cand.val_out)
            ids.append(node_id)
        accepted_layers.append(ids)
        trace.append(best)
        pool = ids + list(range(k))

    if not accepted_layers:
        raise FitError("no neuron produced a finite validation error")
    output = accepted_layers[-1][0]
    neurons, out_node, kept = _prune(created, k, output)
    model = PnnModel(
        feature_names=tuple(train.feature_names),
        x_offset=tuple(map(float, x_off)),
        x_scale=tuple(map(float, x_sc)),
        y_offset=y_off,
        y_scale=y_sc,
        neurons=neurons,
        output_node=out_node,
        node_bounds=tuple(bounds) + tuple(c.bounds for c in kept),
        validation_error_trace=tuple(trace),
    )
    return replace(model, training_rmse=_rmse(model.predict(train.X), train.y))


def _prune(created: list[_Candidate], k: int, output: int):
    """Keep only ancestors of ``output`` and renumber nodes densely."""
    needed: set[int] = set()
    stack = [output]
    while stack:
        node = stack.pop()
        if node < k or node in needed:
            continue
        needed.add(node)
        stack.extend(created[node - k].inputs)
    remap = {j: j for j in range(k)}
    neurons = []
    kept = []
    for node in sorted(needed):
        cand = created[node - k]
        kept.append(cand)
        remap[node] = k + len(neurons)
        i, j = cand.inputs
        neurons.append(
            Neuron((remap[i], remap[j]), tuple(float(c) for c in cand.coef), cand.layer)
        )
    return tuple(neurons), remap[output], kept
