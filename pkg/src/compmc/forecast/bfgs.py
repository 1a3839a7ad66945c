"""Quasi-Newton minimisation with an explicitly maintained inverse Hessian."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import DivergenceError

logger = logging.getLogger(__name__)

CURVATURE_EPS = 1e-12


def inv_hessian_update(
    inv_h: np.ndarray, step: np.ndarray, grad_change: np.ndarray, curvature_eps: float = CURVATURE_EPS
) -> tuple[np.ndarray, bool]:
    """Rank-two update of the inverse Hessian from one accepted step.

    ``step`` is the parameter change and ``grad_change`` the matching change
    in gradient. The expanded product form is used, so no matrix is ever
    inverted. Returns ``(new_inv_h, updated)``; when ``|step . grad_change|``
    is below ``curvature_eps`` the input matrix comes back unchanged with
    ``updated=False``.
    """
    s = np.asarray(step, dtype=float)
    y = np.asarray(grad_change, dtype=float)
    sy = float(s @ y)
    if abs(sy) < curvature_eps:
        return inv_h, False
    hy = inv_h @ y
    yhy = float(y @ hy)
    new = (
        inv_h
        + ((sy + yhy) / (sy * sy)) * np.outer(s, s)
        - (np.outer(hy, s) + np.outer(s, hy)) / sy
    )
    # kill the rounding asymmetry of the two outer products
    new = 0.5 * (new + new.T)
    return new, True


def numeric_gradient(fun: Callable[[np.ndarray], float], x: np.ndarray) -> np.ndarray:
    """Central differences with a per-coordinate step scaled to ``|x|``."""
    x = np.asarray(x, dtype=float)
    h0 = np.cbrt(np.finfo(float).eps)
    g = np.empty_like(x)
    for i in range(x.size):
        h = h0 * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (fun(xp) - fun(xm)) / (xp[i] - xm[i])
    return g


@dataclass
class BfgsState:
    p: np.ndarray
    inv_hessian: np.ndarray
    gradient: np.ndarray
    value: float
    grad_change: np.ndarray | None = None
    step: np.ndarray | None = None
    iteration: int = 0
    step_scalar: float = 1.0


@dataclass
class BfgsConfig:
    max_iter: int = 200
    grad_tol: float = 1e-8
    c1: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 60
    curvature_eps: float = CURVATURE_EPS


@dataclass
class BfgsResult:
    x: np.ndarray
    fun: float
    state: BfgsState
    status: str  # "converged" | "max_iter" | "stalled"
    trace: list[float] = field(default_factory=list)
    skipped_updates: int = 0
    resets: int = 0

    @property
    def stalled(self) -> bool:
        return self.status == "stalled"

    @property
    def n_iter(self) -> int:
        return self.state.iteration


def _finite_eval(fun, grad, x, state):
    f = float(fun(x))
    if not np.isfinite(f):
        raise DivergenceError(f"objective is not finite at iteration {state.iteration}", state)
    g = np.asarray(grad(x), dtype=float)
    if not np.all(np.isfinite(g)):
        raise DivergenceError(f"gradient is not finite at iteration {state.iteration}", state)
    return f, g


def bfgs_minimize(
    fun: Callable[[np.ndarray], float],
    p0,
    grad: Callable[[np.ndarray], np.ndarray] | None = None,
    config: BfgsConfig | None = None,
) -> BfgsResult:
    """Minimise ``fun`` from ``p0``.

    Search direction solves the quasi-Newton system through the inverse
    Hessian (identity at start). The step scalar comes from Armijo
    backtracking. ``grad`` defaults to central finite differences.

    Raises :class:`DivergenceError` on a non-finite objective or gradient
    at an accepted point.
    """
    cfg = config or BfgsConfig()
    gradf = grad if grad is not None else (lambda x: numeric_gradient(fun, x))
    x = np.array(p0, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise DivergenceError("initial point is not finite")
    n = x.size
    state = BfgsState(p=x, inv_hessian=np.eye(n), gradient=np.zeros(n), value=np.nan)
    f, g = _finite_eval(fun, gradf, x, state)
    state.value, state.gradient = f, g
    trace = [f]
    skipped = 0
    resets = 0

    while True:
        if np.linalg.norm(g) <= cfg.grad_tol:
            status = "converged"
            break
        if state.iteration >= cfg.max_iter:
            status = "max_iter"
            break
        direction = -state.inv_hessian @ g
        slope = float(g @ direction)
        if slope >= 0.0:
            # lost positive definiteness; fall back to steepest descent
            state.inv_hessian = np.eye(n)
            direction = -g
            slope = float(g @ direction)
            resets += 1

        S = 1.0
        accepted = False
        for _ in range(cfg.max_backtracks):
            x_new = x + S * direction
            f_new = float(fun(x_new))
            if np.isfinite(f_new) and f_new <= f + cfg.c1 * S * slope:
                accepted = True
                break
            S *= cfg.shrink
        if not accepted:
            status = "stalled"
            logger.debug("line search stalled at iteration %d (f=%g)", state.iteration, f)
            break

        g_new = np.asarray(gradf(x_new), dtype=float)
        if not np.all(np.isfinite(g_new)):
            raise DivergenceError(
                f"gradient is not finite at iteration {state.iteration + 1}", state
            )
        step = x_new - x
        grad_change = g_new - g
        # only positive curvature keeps the inverse Hessian positive definite
        if float(step @ grad_change) > cfg.curvature_eps:
            state.inv_hessian, _ = inv_hessian_update(
                state.inv_hessian, step, grad_change, cfg.curvature_eps
            )
        else:
            skipped += 1

        x, f, g = x_new, f_new, g_new
        state.p, state.value, state.gradient = x, f, g
        state.step, state.grad_change = step, grad_change
        state.step_scalar = S
        state.iteration += 1
        trace.append(f)

    return BfgsResult(
        x=x, fun=f, state=state, status=status, trace=trace, skipped_updates=skipped, resets=resets
    )
