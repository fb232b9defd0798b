"""Damped-and-driven breathers: exact Newton solutions and leading-order profiles.

A breather is a fixed point of the rotating-frame flow.  The gauge freedom
under global rotation is fixed by q_1 = 0, which leaves the 2N unknowns
(p_1..p_N, q_2..q_N, beta) against the 2N fixed-point equations; the driving
amplitude beta is determined by the solve rather than prescribed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContinuationStalledError, InvalidInputError, NoConvergenceError, \
    SingularJacobianError
from .lattice import CartesianState, LatticeParams, cartesian_rhs, cartesian_to_energy_phase, \
    field_jacobian
from .numerics import NewtonConfig, newton_solve



@dataclass(frozen=True)
class Breather:
    """A converged fixed point; params.beta holds the solved driving beta*."""

    params: LatticeParams
    state: CartesianState
    residual_norm: float
    omega: float

    @property
    def beta(self) -> float:
        return self.params.beta


@dataclass(frozen=True)
class AsymptoticBreather(Breather):
    """Leading-order profile in the coupling; same shape as Breather."""

    order: str = "leading"


def residual(p, q, beta, params: LatticeParams) -> np.ndarray:
    """Fixed-point residual: the full vector field at (p, q) with driving beta.

    Components 1..N are the p-equations (site 1 carries +beta p_1, site N
    carries -gamma p_N); components N+1..2N are the q-equations.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.size != params.n_sites or q.size != params.n_sites:
        raise InvalidInputError("state dimensions do not match params")
    args = np.array([params.eps, params.gamma, beta, params.omega])
    return cartesian_rhs(0.0, np.concatenate([p, q]), args)


def _pack(state: CartesianState, beta: float) -> np.ndarray:
    return np.concatenate([state.p, state.q[1:], [beta]])


def _unpack(x: np.ndarray, n: int):
    p = x[:n]
    q = np.concatenate([[0.0], x[n:2 * n - 1]])
    return p, q, x[-1]


def _solver_residual(x, params):
    p, q, beta = _unpack(x, params.n_sites)
    return residual(p, q, beta, params)


def _solver_jacobian(x, params):
    n = params.n_sites
    p, q, beta = _unpack(x, n)
    # beta enters the field Jacobian only additively on the site-1 diagonal,
    # so evaluate at beta = 0 and add it (beta may be transiently negative
    # during the iteration, which LatticeParams would reject).
    jf = field_jacobian(p, q, params.replace(beta=0.0))
    jf[0, 0] += beta
    jf[n, n] += beta
    jac = np.empty((2 * n, 2 * n))
    jac[:, :n] = jf[:, :n]
    jac[:, n:2 * n - 1] = jf[:, n + 1:]
    dbeta = np.zeros(2 * n)
    dbeta[0] = p[0]
    dbeta[n] = q[0]
    jac[:, -1] = dbeta
    return jac


def asymptotic_breather(eps, gamma, omega, n_sites) -> AsymptoticBreather:
    """Leading-order breather profile with p_1 = sqrt(omega).

    The p-profile decays geometrically with ratio -eps/omega; the q-profile
    grows toward the damped end, q_j = (gamma/omega)(-eps/omega)^(2N-j-1) p_1,
    so that q_N/p_N = gamma/omega exactly.  The matching driving amplitude is
    beta = gamma (eps/omega)^(2N-2).
    """
    base = LatticeParams(n_sites=n_sites, eps=eps, gamma=gamma, beta=0.0, omega=omega)
    n = base.n_sites
    p1 = np.sqrt(omega)
    ratio = -eps / omega
    p = p1 * ratio ** np.arange(n)
    q = np.zeros(n)
    j = np.arange(2, n + 1)
    q[1:] = (gamma / omega) * ratio ** (2 * n - j - 1) * p1
    beta = gamma * (eps / omega) ** (2 * n - 2)
    params = base.replace(beta=beta)
    state = CartesianState(p=p, q=q)
    rnorm = float(np.max(np.abs(residual(p, q, beta, params))))
    return AsymptoticBreather(params=params, state=state, residual_norm=rnorm,
                              omega=omega, order="leading")


def _finish(x, params, rnorm) -> Breather:
    n = params.n_sites
    p, q, beta = _unpack(x, n)
    if params.gamma == 0.0 or params.eps == 0.0:
        beta = 0.0   # exact decoupled limits; the solve leaves roundoff here
    solved = params.replace(beta=beta)
    return Breather(params=solved, state=CartesianState(p=p, q=q),
                    residual_norm=rnorm, omega=params.omega)


def solve_from_seed(state: CartesianState, beta, params: LatticeParams,
                    cfg: NewtonConfig | None = None):
    """Newton solve from an explicit seed; returns (Breather, NewtonResult)."""
    cfg = cfg or NewtonConfig()
    x0 = _pack(state, beta)
    res = newton_solve(lambda x: _solver_residual(x, params),
                       lambda x: _solver_jacobian(x, params), x0, cfg)
    return _finish(res.x, params, res.residual_norm), res


def solve_breather_result(eps, gamma, omega, n_sites, cfg=None):
    """Like solve_breather but also returns the Newton iteration report."""
    seed = asymptotic_breather(eps, gamma, omega, n_sites)
    return solve_from_seed(seed.state, seed.params.beta, seed.params, cfg)


def solve_breather(eps, gamma, omega, n_sites,
                   cfg: NewtonConfig | None = None) -> Breather:
    """Newton solve for the breather, seeded by the leading-order profile."""
    br, _ = solve_breather_result(eps, gamma, omega, n_sites, cfg)
    return br


@dataclass(frozen=True)
class ContinuationConfig:
    initial_step: float = 0.01     # first omega step
    min_step: float = 1e-10        # stall threshold
    growth: float = 1.5            # step growth after a fast solve
    fast_iters: int = 3            # "fast" means at most this many Newton iterations
    newton: NewtonConfig = NewtonConfig()


def continue_in_omega(breather: Breather, omega_target: float,
                      step_cfg: ContinuationConfig | None = None) -> list[Breather]:
    """Natural-parameter continuation of the breather family in omega.

    The step halves on a Newton failure and grows after fast convergence.
    Step underflow before omega_target raises ContinuationStalledError with
    the partial family attached (a candidate bifurcation point).
    """
    cfg = step_cfg or ContinuationConfig()
    family = [breather]
    current = breather
    if omega_target == breather.omega:
        return family
    direction = 1.0 if omega_target > breather.omega else -1.0
    step = min(cfg.initial_step, abs(omega_target - breather.omega))
    while current.omega != omega_target:
        remaining = abs(omega_target - current.omega)
        step = min(step, remaining)
        omega_next = omega_target if step >= remaining else current.omega + direction * step
        params_next = current.params.replace(omega=omega_next)
        try:
            nxt, report = solve_from_seed(current.state, current.params.beta,
                                          params_next, cfg.newton)
        except (NoConvergenceError, SingularJacobianError):
            step *= 0.5
            if step < cfg.min_step:
                raise ContinuationStalledError(
                    f"continuation stalled at omega={current.omega:.12g} "
                    f"(candidate bifurcation)", family)
            continue
        family.append(nxt)
        current = nxt
        if report.iterations <= cfg.fast_iters:
            step *= cfg.growth
    return family


def twist(breather: Breather) -> np.ndarray:
    """Adjacent phase differences psi_j of the breather (wrapped)."""
    return cartesian_to_energy_phase(breather.state).phase_diffs.copy()


def twist_leading(params: LatticeParams) -> np.ndarray:
    """Leading-order twist psi_j = (gamma/omega)(eps/omega)^(2(N-j-1)).

    Independent of N at the last bond: psi_{N-1} = gamma/omega.
    """
    n = params.n_sites
    j = np.arange(1, n)
    return (params.gamma / params.omega) * (params.eps / params.omega) ** (2 * (n - j - 1))


def beta_leading(params: LatticeParams) -> float:
    """Leading-order driving amplitude gamma (eps/omega)^(2N-2)."""
    return params.gamma * (params.eps / params.omega) ** (2 * params.n_sites - 2)


def beta_omega_slope_leading(params: LatticeParams) -> float:
    """Leading-order d beta/d omega = -(2N-2) gamma eps^(2N-2) / omega^(2N-1).

    This is the omega-derivative of beta_leading, and the slope consistent
    with the small-eigenvalue formula 2(2N-2) gamma eps^(2N-2) at omega = 1.
    """
    n = params.n_sites
    return -(2 * n - 2) * params.gamma * params.eps ** (2 * n - 2) \
        / params.omega ** (2 * n - 1)
