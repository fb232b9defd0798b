"""Damped Newton solver."""

import numpy as np
import pytest

import breather_lab as bl


def test_scalar_quadratic():
    res = bl.newton_solve(lambda x: x * x - 4.0, lambda x: np.array([[2.0 * x[0]]]),
                          np.array([3.0]))
    assert res.x[0] == pytest.approx(2.0, abs=1e-12)
    assert res.iterations <= 6


def test_quadratic_convergence_tail():
    res = bl.newton_solve(lambda x: x * x - 4.0, lambda x: np.array([[2.0 * x[0]]]),
                          np.array([3.0]), bl.NewtonConfig(residual_tol=1e-14))
    hist = [r for r in res.residual_history if r > 0]
    # r_{k+1} <= C r_k^2 on the tail
    assert hist[-1] <= 10.0 * hist[-2] ** 2


def test_singular_linear_system():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(bl.SingularJacobianError):
        bl.newton_solve(lambda x: a @ x - np.array([1.0, 1.0]), lambda x: a,
                        np.array([0.0, 0.0]))


def test_no_real_root_reports_best_iterate():
    with pytest.raises(bl.NoConvergenceError) as err:
        bl.newton_solve(lambda x: x * x + 1.0, lambda x: np.array([[2.0 * x[0]]]),
                        np.array([2.0]), bl.NewtonConfig(max_iters=25))
    assert err.value.x_best.shape == (1,)
    assert err.value.residual_norm >= 1.0
    assert len(err.value.history) == 26


def test_line_search_handles_overshooting():
    # steep tanh root: the full Newton step overshoots wildly from x0=1.2
    f = lambda x: np.tanh(20.0 * x)
    jac = lambda x: np.array([[20.0 / np.cosh(20.0 * x[0]) ** 2]])
    res = bl.newton_solve(f, jac, np.array([1.2]),
                          bl.NewtonConfig(residual_tol=1e-13, max_iters=300,
                                          damping_min=1.0 / 2**20))
    assert abs(res.x[0]) < 1e-8


def test_zero_iterations_when_seeded_at_root():
    res = bl.newton_solve(lambda x: x - 1.0, lambda x: np.eye(1), np.array([1.0]))
    assert res.iterations == 0


def test_dimension_checks():
    with pytest.raises(bl.InvalidInputError):
        bl.newton_solve(lambda x: np.array([1.0, 2.0]), lambda x: np.eye(2),
                        np.array([1.0]))
    with pytest.raises(bl.InvalidInputError):
        bl.newton_solve(lambda x: x, lambda x: np.ones((1, 2)), np.array([1.0]))


def test_config_validation():
    for bad in (dict(residual_tol=0.0), dict(max_iters=0), dict(damping_min=0.0),
                dict(damping_min=2.0)):
        with pytest.raises(bl.InvalidInputError):
            bl.NewtonConfig(**bad)
