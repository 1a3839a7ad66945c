import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compmc.errors import DivergenceError
from compmc.forecast import BfgsConfig, bfgs_minimize, inv_hessian_update, numeric_gradient

from oracles import gauss_inverse, gauss_solve, hessian_update


def rosenbrock(p):
    return (1 - p[0]) ** 2 + 100 * (p[1] - p[0] ** 2) ** 2


def rosenbrock_grad(p):
    return np.array(
        [-2 * (1 - p[0]) - 400 * p[0] * (p[1] - p[0] ** 2), 200 * (p[1] - p[0] ** 2)]
    )


def random_spd(rng, n):
    M = rng.normal(size=(n, n))
    return M @ M.T + n * np.eye(n)


def test_sphere():
    res = bfgs_minimize(lambda p: float(p @ p), [3.0, 4.0], lambda p: 2 * p)
    assert np.linalg.norm(res.x) < 1e-6
    assert res.status == "converged"


def test_rosenbrock_analytic_gradient():
    res = bfgs_minimize(rosenbrock, [-1.2, 1.0], rosenbrock_grad, BfgsConfig(max_iter=500))
    assert np.max(np.abs(res.x - 1.0)) < 1e-4


def test_rosenbrock_finite_differences():
    res = bfgs_minimize(rosenbrock, [-1.2, 1.0], config=BfgsConfig(max_iter=500, grad_tol=1e-7))
    assert np.max(np.abs(res.x - 1.0)) < 1e-4


def test_quadratic_matches_gauss():
    rng = np.random.default_rng(5)
    A = random_spd(rng, 5)
    b = rng.normal(size=5)
    res = bfgs_minimize(lambda p: 0.5 * p @ A @ p - b @ p, np.zeros(5), lambda p: A @ p - b)
    oracle = gauss_solve(A.tolist(), b.tolist())
    assert np.max(np.abs(res.x - oracle)) < 1e-6


def test_trace_is_monotone():
    res = bfgs_minimize(rosenbrock, [-1.2, 1.0], rosenbrock_grad, BfgsConfig(max_iter=500))
    assert all(b <= a for a, b in zip(res.trace, res.trace[1:]))
    assert res.fun <= rosenbrock(np.array([-1.2, 1.0]))


def test_max_iter_status():
    res = bfgs_minimize(rosenbrock, [-1.2, 1.0], rosenbrock_grad, BfgsConfig(max_iter=3))
    assert res.status == "max_iter"
    assert res.n_iter == 3


def test_divergence_on_non_finite_start():
    with pytest.raises(DivergenceError):
        bfgs_minimize(lambda p: float("nan"), [1.0])
    with pytest.raises(DivergenceError):
        bfgs_minimize(lambda p: 0.0, [float("inf")])


def test_stall_is_flagged():
    # a kink at zero: no step along a nonzero subgradient decreases |p| enough
    res = bfgs_minimize(lambda p: abs(p[0]) if p[0] != 0 else 0.0, [0.0], lambda p: np.array([1.0]))
    assert res.stalled
    assert res.fun == 0.0


def test_state_invariants_after_run():
    res = bfgs_minimize(rosenbrock, [-1.2, 1.0], rosenbrock_grad, BfgsConfig(max_iter=500))
    H = res.state.inv_hessian
    assert np.max(np.abs(H - H.T)) <= 1e-9
    assert res.state.step_scalar > 0


def test_update_identity_example():
    H, ok = inv_hessian_update(np.eye(2), np.array([1.0, 0.0]), np.array([1.0, 0.0]))
    assert ok
    assert np.array_equal(H @ np.array([1.0, 0.0]), np.array([1.0, 0.0]))
    assert np.array_equal(H, H.T)


def test_update_skipped_without_curvature():
    H0 = np.eye(2)
    H, ok = inv_hessian_update(H0, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    assert not ok
    assert H is H0


def test_update_matches_inverted_hessian_update():
    rng = np.random.default_rng(11)
    for _ in range(50):
        Hinv = np.linalg.inv(random_spd(rng, 3))
        s = rng.normal(size=3)
        y = rng.normal(size=3)
        if s @ y <= 0:
            y = -y
        new, _ = inv_hessian_update(Hinv, s, y)
        H = gauss_inverse(Hinv.tolist())
        oracle = gauss_inverse(hessian_update(H, s.tolist(), y.tolist()))
        assert np.max(np.abs(new - np.asarray(oracle))) <= 1e-8


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_update_symmetry_and_secant(n, seed):
    rng = np.random.default_rng(seed)
    Hinv = np.linalg.inv(random_spd(rng, n))
    s = rng.normal(size=n)
    y = rng.normal(size=n)
    if s @ y < 0:
        y = -y
    if s @ y < 1e-6:
        return
    new, ok = inv_hessian_update(Hinv, s, y)
    assert ok
    assert np.max(np.abs(new - new.T)) <= 1e-9
    assert np.max(np.abs(new @ y - s)) <= 1e-6


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gradient_check(seed):
    rng = np.random.default_rng(seed)
    p = rng.uniform(-2, 2, size=2)
    g = rosenbrock_grad(p)
    fd = numeric_gradient(rosenbrock, p)
    assert np.allclose(fd, g, rtol=1e-5, atol=1e-5)
