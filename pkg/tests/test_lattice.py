"""Chain vector fields and the Cartesian <-> energy-phase coordinate maps."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import breather_lab as bl
from breather_lab.lattice import cartesian_rhs


def params(n=3, eps=0.03, gamma=0.0, beta=0.0, omega=1.0):
    return bl.LatticeParams(n_sites=n, eps=eps, gamma=gamma, beta=beta, omega=omega)


def random_state(n, rng, floor=0.3):
    return bl.CartesianState(p=floor + rng.random(n), q=floor + rng.random(n))


class TestParams:
    def test_rejects_short_chain(self):
        with pytest.raises(bl.InvalidInputError):
            bl.LatticeParams(n_sites=1, eps=0.1)

    @pytest.mark.parametrize("bad", [dict(gamma=-0.1), dict(beta=-1e-3),
                                     dict(omega=0.0), dict(eps=np.inf)])
    def test_rejects_bad_scalars(self, bad):
        with pytest.raises(bl.InvalidInputError):
            bl.LatticeParams(n_sites=2, eps=0.1, **bad)


class TestCartesianField:
    def test_single_site_breather_is_fixed_point(self):
        state = bl.CartesianState(p=[1.0, 0.0], q=[0.0, 0.0])
        dot = bl.vector_field_cartesian(state, params(n=2, eps=0.0))
        assert np.all(dot.p == 0.0) and np.all(dot.q == 0.0)

    def test_converged_breather_zeroes_field(self):
        br = bl.solve_breather(0.03, 0.0035, 1.0, 3)
        dot = bl.vector_field_cartesian(br.state, br.params)
        assert np.max(np.abs(np.concatenate([dot.p, dot.q]))) < 1e-12

    def test_hamiltonian_limit_conserves_norm_instantaneously(self):
        rng = np.random.default_rng(3)
        state = random_state(4, rng)
        dot = bl.vector_field_cartesian(state, params(n=4, eps=-0.2))
        ddt_norm = 2.0 * (state.p @ dot.p + state.q @ dot.q)
        assert abs(ddt_norm) < 1e-14

    def test_dimension_mismatch(self):
        state = bl.CartesianState(p=[1.0, 0.0], q=[0.0, 0.0])
        with pytest.raises(bl.InvalidInputError):
            bl.vector_field_cartesian(state, params(n=3))

    def test_damping_and_driving_enter_rates(self):
        # d/dt sum E_j = 2 beta E_1 - 2 gamma E_N at a p-only state
        state = bl.CartesianState(p=[1.0, 0.5, 0.25], q=[0.0, 0.0, 0.0])
        pr = params(n=3, eps=0.07, gamma=0.02, beta=0.01)
        dot = bl.vector_field_cartesian(state, pr)
        rate = 2.0 * (state.p @ dot.p + state.q @ dot.q)
        e = state.site_energies()
        assert rate == pytest.approx(4 * pr.beta * e[0] - 4 * pr.gamma * e[2], rel=1e-12)


class TestEnergyPhaseField:
    def test_symmetric_decay_rates(self):
        # equal energies with sin(psi) = -gamma/(2 eps): exact exponential decay
        eps, gamma, e0 = 0.03, 0.01, 0.8
        psi = float(np.arcsin(-gamma / (2 * eps)))
        state = bl.EnergyPhaseState(energies=[e0 / 2, e0 / 2], phase_diffs=[psi])
        de, dpsi = bl.vector_field_energy_phase(state, params(n=2, eps=eps, gamma=gamma))
        assert de == pytest.approx([-gamma * e0 / 2, -gamma * e0 / 2], rel=1e-12)
        assert dpsi[0] == pytest.approx(0.0, abs=1e-15)

    def test_two_site_fixed_point_is_stationary(self):
        eps, gamma = -0.1, 0.005
        beta = bl.beta_for_site1_energy(eps, gamma, 0.5)
        fp = bl.damped_driven_fixed_point(eps, gamma, beta)
        state = bl.EnergyPhaseState(energies=[fp.e1, fp.e2], phase_diffs=[fp.psi])
        de, dpsi = bl.vector_field_energy_phase(
            state, params(n=2, eps=eps, gamma=gamma, beta=beta, omega=fp.omega))
        assert np.max(np.abs(np.concatenate([de, dpsi]))) < 1e-14

    def test_symmetric_in_phase_state_has_zero_psi_dot(self):
        state = bl.EnergyPhaseState(energies=[0.4, 0.4, 0.4], phase_diffs=[0.0, 0.0])
        de, dpsi = bl.vector_field_energy_phase(state, params(n=3, eps=0.05))
        assert np.max(np.abs(dpsi)) < 1e-15

    def test_zero_energy_site_is_singular(self):
        state = bl.EnergyPhaseState(energies=[0.5, 0.0], phase_diffs=[0.1])
        with pytest.raises(bl.SingularStateError):
            bl.vector_field_energy_phase(state, params(n=2))

    def test_matches_pushforward_of_cartesian_field(self):
        # chain-rule oracle: finite differences of the coordinate map applied
        # to the Cartesian flow must reproduce the energy-phase field
        rng = np.random.default_rng(0)
        pr = bl.LatticeParams(n_sites=4, eps=-0.07, gamma=0.02, beta=0.01, omega=1.1)
        state = random_state(4, rng, floor=0.5)
        dot = bl.vector_field_cartesian(state, pr)
        d = 3e-6
        plus = bl.cartesian_to_energy_phase(
            bl.CartesianState(p=state.p + d * dot.p, q=state.q + d * dot.q))
        minus = bl.cartesian_to_energy_phase(
            bl.CartesianState(p=state.p - d * dot.p, q=state.q - d * dot.q))
        de_fd = (plus.energies - minus.energies) / (2 * d)
        dpsi_fd = (plus.phase_diffs - minus.phase_diffs) / (2 * d)
        de, dpsi = bl.vector_field_energy_phase(bl.cartesian_to_energy_phase(state), pr)
        assert np.max(np.abs(de - de_fd)) < 1e-10
        assert np.max(np.abs(dpsi - dpsi_fd)) < 1e-10


class TestCoordinateMaps:
    def test_in_phase_pair(self):
        ep = bl.cartesian_to_energy_phase(bl.CartesianState(p=[1, 1], q=[0, 0]))
        assert ep.energies == pytest.approx([0.5, 0.5])
        assert ep.phase_diffs == pytest.approx([0.0])

    def test_quarter_turn_pair(self):
        ep = bl.cartesian_to_energy_phase(bl.CartesianState(p=[1, 0], q=[0, 1]))
        assert ep.phase_diffs == pytest.approx([np.pi / 2])

    def test_inverse_map_examples(self):
        st1 = bl.energy_phase_to_cartesian(
            bl.EnergyPhaseState(energies=[0.5, 0.5], phase_diffs=[0.0]), 0.0)
        assert st1.p == pytest.approx([1.0, 1.0]) and st1.q == pytest.approx([0.0, 0.0])
        st2 = bl.energy_phase_to_cartesian(
            bl.EnergyPhaseState(energies=[0.5, 0.5], phase_diffs=[np.pi]), 0.0)
        assert st2.p == pytest.approx([1.0, -1.0], abs=1e-15)

    @settings(deadline=None, max_examples=60)
    @given(st.integers(2, 6), st.integers(0, 2**32 - 1))
    def test_round_trip(self, n, seed):
        rng = np.random.default_rng(seed)
        state = bl.CartesianState(p=0.2 + rng.random(n), q=0.2 + rng.random(n))
        ep = bl.cartesian_to_energy_phase(state)
        phi1 = float(np.arctan2(state.q[0], state.p[0]))
        back = bl.energy_phase_to_cartesian(ep, phi1)
        assert np.max(np.abs(back.p - state.p)) < 1e-13
        assert np.max(np.abs(back.q - state.q)) < 1e-13

    @settings(deadline=None, max_examples=60)
    @given(st.floats(-10, 10))
    def test_rotational_equivariance(self, theta):
        rng = np.random.default_rng(7)
        state = bl.CartesianState(p=0.3 + rng.random(3), q=0.3 + rng.random(3))
        a = bl.cartesian_to_energy_phase(state)
        b = bl.cartesian_to_energy_phase(state.rotated(theta))
        assert np.max(np.abs(a.energies - b.energies)) < 1e-13
        assert np.max(np.abs(a.phase_diffs - b.phase_diffs)) < 1e-12

    def test_zero_amplitude_site_raises(self):
        with pytest.raises(bl.SingularStateError):
            bl.cartesian_to_energy_phase(bl.CartesianState(p=[1, 0], q=[0, 0]))

    def test_negative_energy_rejected(self):
        with pytest.raises(bl.InvalidInputError):
            bl.EnergyPhaseState(energies=[0.5, -0.1], phase_diffs=[0.0])


class TestWrapPhase:
    @settings(deadline=None, max_examples=100)
    @given(st.floats(-1e6, 1e6))
    def test_range_and_congruence(self, x):
        w = bl.wrap_phase(x)
        assert -np.pi < w <= np.pi
        assert abs((w - x) / (2 * np.pi) - round((w - x) / (2 * np.pi))) < 1e-6

    def test_boundary_maps_to_positive_pi(self):
        assert bl.wrap_phase(np.pi) == pytest.approx(np.pi)
        assert bl.wrap_phase(-np.pi) == pytest.approx(np.pi)


class TestInstantaneousFrequency:
    def test_isolated_site_value(self):
        state = bl.EnergyPhaseState(energies=[0.5, 0.0], phase_diffs=[0.0])
        assert bl.instantaneous_frequency(state, params(n=2, eps=0.03)) == \
            pytest.approx(1.03)

    def test_no_coupling_gives_twice_energy(self):
        state = bl.EnergyPhaseState(energies=[0.37, 0.2], phase_diffs=[0.4])
        assert bl.instantaneous_frequency(state, params(n=2, eps=0.0)) == \
            pytest.approx(0.74)

    def test_breather_rotates_at_solve_frequency(self):
        br = bl.solve_breather(-0.1, 0.005, 1.0, 3)
        ep = bl.cartesian_to_energy_phase(br.state)
        assert abs(bl.instantaneous_frequency(ep, br.params) - 1.0) < 1e-9

    def test_zero_first_site_raises(self):
        state = bl.EnergyPhaseState(energies=[0.0, 0.5], phase_diffs=[0.0])
        with pytest.raises(bl.SingularStateError):
            bl.instantaneous_frequency(state, params(n=2))


class TestFieldJacobian:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        pr = bl.LatticeParams(n_sites=4, eps=-0.07, gamma=0.02, beta=0.01, omega=1.1)
        state = random_state(4, rng)
        jac = bl.field_jacobian(state.p, state.q, pr)
        y0 = state.as_vector()
        h = 1e-6
        fd = np.empty_like(jac)
        for k in range(8):
            yp, ym = y0.copy(), y0.copy()
            yp[k] += h
            ym[k] -= h
            fd[:, k] = (cartesian_rhs(0.0, yp, pr.as_array())
                        - cartesian_rhs(0.0, ym, pr.as_array())) / (2 * h)
        assert np.max(np.abs(jac - fd)) / np.max(np.abs(jac)) < 1e-7
