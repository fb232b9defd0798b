"""Adaptive and fixed-step integration drivers."""

import math

import numpy as np
import pytest

import breather_lab as bl
from breather_lab.numerics.integrate import _adaptive_core_impl


def test_linear_decay():
    gamma = 0.005
    res = bl.integrate(lambda t, y: -gamma * y, np.array([1.0]), (0.0, 1000.0))
    assert res.y[0] == pytest.approx(math.exp(-5.0), rel=1e-8)


def test_symmetric_decay_trace(warm_driver):
    # equal-energy two-site decay: E_1(t) = E_0/2 exp(-gamma t)
    eps, gamma, e0 = 0.05, 0.01, 0.9
    psi = bl.symmetric_decay_phases(eps, gamma)["in_phase"]
    state = bl.energy_phase_to_cartesian(
        bl.EnergyPhaseState(energies=[e0 / 2, e0 / 2], phase_diffs=[psi]))
    params = bl.LatticeParams(n_sites=2, eps=eps, gamma=gamma, beta=0.0, omega=e0)
    traj = bl.simulate_damped(state, params, t_end=2000.0, sample_stride=5.0)
    expected = 0.5 * e0 * np.exp(-gamma * traj.times)
    rel = np.abs(traj.energies()[:, 0] - expected) / expected
    assert np.max(rel) < 1e-6


def test_harmonic_rotation_energy():
    f = lambda t, y: np.array([y[1], -y[0]])
    span = (0.0, 2.0 * math.pi * 1000.0)
    tight = bl.IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    res = bl.integrate(f, np.array([1.0, 0.0]), span, tight)
    assert abs(res.y @ res.y - 1.0) < 1e-9
    # at the default tolerances the order-5 pair loses ~1e-7 over 10^3 periods
    res_def = bl.integrate(f, np.array([1.0, 0.0]), span)
    assert abs(res_def.y @ res_def.y - 1.0) < 5e-7


def test_fixed_rk4_order():
    f = lambda t, y: -y
    exact = math.exp(-2.0)
    errs = []
    for h in (0.1, 0.05):
        cfg = bl.IntegratorConfig(method="fixed_rk4", max_step=h)
        errs.append(abs(bl.integrate(f, np.array([1.0]), (0.0, 2.0), cfg).y[0] - exact))
    assert 12.0 < errs[0] / errs[1] < 20.0


def test_fixed_rk4_needs_finite_step():
    cfg = bl.IntegratorConfig(method="fixed_rk4")
    with pytest.raises(bl.InvalidInputError):
        bl.integrate(lambda t, y: -y, np.array([1.0]), (0.0, 1.0), cfg)


def test_python_and_compiled_paths_agree(warm_driver):
    from breather_lab.metastability import _fast_rhs
    from breather_lab.lattice import cartesian_rhs
    params = bl.LatticeParams(n_sites=3, eps=-0.1, gamma=0.01, beta=0.0, omega=1.0)
    y0 = np.array([1.0, 0.1, 0.01, 0.0, 0.05, 0.02])
    te = np.linspace(0.0, 50.0, 11)
    fast = bl.integrate(_fast_rhs(), y0, (0.0, 50.0), t_eval=te, args=params.as_array())
    slow = bl.integrate(cartesian_rhs, y0, (0.0, 50.0), t_eval=te, args=params.as_array())
    assert np.max(np.abs(fast.ys - slow.ys)) < 1e-10
    assert fast.n_accepted == slow.n_accepted


def test_observer_sees_every_accepted_step():
    seen = []
    res = bl.integrate(lambda t, y: -y, np.array([1.0]), (0.0, 5.0),
                       observer=lambda t, y: seen.append(t))
    assert len(seen) == res.n_accepted
    assert seen[-1] == pytest.approx(5.0)
    assert np.all(np.diff(seen) > 0)


def test_dense_sampling_matches_endpoint():
    te = np.linspace(0.0, 3.0, 7)
    res = bl.integrate(lambda t, y: -y, np.array([2.0]), (0.0, 3.0), t_eval=te)
    assert np.max(np.abs(res.ys[:, 0] - 2.0 * np.exp(-te))) < 1e-9
    assert res.ys[-1, 0] == pytest.approx(res.y[0])


def test_blowup_raises_with_last_good_point():
    # y' = y^2 from y(0)=1 blows up at t=1
    with pytest.raises(bl.IntegrationFailureError) as err:
        bl.integrate(lambda t, y: y * y, np.array([1.0]), (0.0, 2.0),
                     t_eval=np.linspace(0, 2, 21))
    assert err.value.t_last < 1.001
    assert err.value.y_last[0] > 1e3
    assert err.value.states.shape[0] == err.value.times.shape[0]


def test_input_validation():
    with pytest.raises(bl.InvalidInputError):
        bl.integrate(lambda t, y: -y, np.array([1.0]), (1.0, 0.0))
    with pytest.raises(bl.InvalidInputError):
        bl.integrate(lambda t, y: np.array([1.0, 2.0]), np.array([1.0]), (0.0, 1.0))
    with pytest.raises(bl.InvalidInputError):
        bl.IntegratorConfig(rel_tol=0.0)
    with pytest.raises(bl.InvalidInputError):
        bl.IntegratorConfig(method="leapfrog")


def test_core_impl_runs_uncompiled():
    # the numba-compilable source is plain Python too
    f = lambda t, y, args: -args[0] * y
    status, t, y, ys, nacc, nrej, idx = _adaptive_core_impl(
        f, np.array([1.0]), 0.0, 10.0, 1e-10, 1e-12, np.inf, 0.0,
        np.array([5.0, 10.0]), np.array([0.3]))
    assert status == 0
    assert y[0] == pytest.approx(math.exp(-3.0), rel=1e-8)
    assert ys[0, 0] == pytest.approx(math.exp(-1.5), rel=1e-8)
