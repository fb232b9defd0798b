"""Closed forms for the two-site chain.

Everything here is analytic: the undamped fixed-point family, its
damped-driven continuation, the 3x3 energy-phase linearization, the exact
symmetric-decay solutions, the slowly-varying phase-shift approximation,
and the energy-decay law built on the lower Lambert W branch together with
its validity horizon tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ApproximationBreakdownError, DomainError, InvalidInputError, \
    NoFixedPointError, PastValidityError
from .lattice import wrap_phase
from .numerics import eig_dense, lambert_w_minus1


@dataclass(frozen=True)
class TwoSiteFixedPoint:
    e1: float
    e2: float
    psi: float
    branch: str          # sym_in_phase | sym_anti_phase | asym_high_first | asym_high_second
    omega: float


@dataclass(frozen=True)
class DampedDrivenTwoSite:
    e1: float
    e2: float
    psi: float
    omega: float


def undamped_family(total_energy: float, eps: float) -> list[TwoSiteFixedPoint]:
    """All fixed points of the undamped two-site energy-phase flow at total energy E.

    The symmetric branches exist for every E > 0; the asymmetric pair needs
    E >= |eps| and is returned with the phase that zeroes psi-dot: pi for
    eps > 0 and 0 for eps < 0.  Frequencies: E, E + 2 eps, and 2E + eps for
    the asymmetric pair.
    """
    e = float(total_energy)
    if e <= 0:
        raise InvalidInputError(f"total energy must be > 0, got {e}")
    half = 0.5 * e
    out = [
        TwoSiteFixedPoint(e1=half, e2=half, psi=0.0, branch="sym_in_phase", omega=e),
        TwoSiteFixedPoint(e1=half, e2=half, psi=np.pi, branch="sym_anti_phase",
                          omega=e + 2.0 * eps),
    ]
    if eps != 0.0 and e < abs(eps):
        return out   # asymmetric branches do not exist below E = |eps|
    s = math.sqrt(max(e * e - eps * eps, 0.0))
    psi_asym = np.pi if eps > 0 else 0.0
    omega_asym = 2.0 * e + eps
    out.append(TwoSiteFixedPoint(e1=0.5 * (e + s), e2=0.5 * (e - s),
                                 psi=psi_asym, branch="asym_high_first",
                                 omega=omega_asym))
    out.append(TwoSiteFixedPoint(e1=0.5 * (e - s), e2=0.5 * (e + s),
                                 psi=psi_asym, branch="asym_high_second",
                                 omega=omega_asym))
    return out


def damped_driven_fixed_point(eps: float, gamma: float, beta: float) -> DampedDrivenTwoSite:
    """Continuation of the high-first asymmetric branch to gamma, beta > 0.

    E1 E2 = (eps^2 - gamma beta)/4 and E1/E2 = gamma/beta; the family
    terminates at gamma beta = eps^2.
    """
    if gamma <= 0 or beta <= 0:
        raise InvalidInputError("damped-driven fixed point needs gamma > 0 and beta > 0")
    gb = gamma * beta
    if gb >= eps * eps:
        raise NoFixedPointError(
            f"no fixed point: gamma*beta = {gb:g} >= eps^2 = {eps * eps:g}")
    s = math.sqrt(eps * eps - gb)
    e1 = 0.5 * math.sqrt(gamma / beta) * s
    e2 = 0.5 * math.sqrt(beta / gamma) * s
    root = math.sqrt(gb) / eps
    psi = -np.pi + math.asin(root) if eps > 0 else -math.asin(root)
    return DampedDrivenTwoSite(e1=e1, e2=e2, psi=float(wrap_phase(psi)),
                               omega=2.0 * (e1 + e2) + eps)


def beta_for_site1_energy(eps: float, gamma: float, e1: float = 0.5) -> float:
    """Driving amplitude that puts the damped-driven fixed point at the given E1."""
    if gamma <= 0 or e1 <= 0:
        raise InvalidInputError("need gamma > 0 and e1 > 0")
    return gamma * eps * eps / (4.0 * e1 * e1 + gamma * gamma)


def beta_for_omega(eps: float, gamma: float, omega: float) -> float:
    """Driving amplitude that puts the damped-driven fixed point at frequency omega.

    Solves 2(E1+E2) + eps = omega with the closed-form energies; reduces to a
    quadratic in r = sqrt(beta/gamma).
    """
    target = omega - eps
    if target <= 0:
        raise InvalidInputError("omega - eps must be positive")
    # 2(E1+E2) = (1/r + r) sqrt(eps^2 - gamma^2 r^2) with r = sqrt(beta/gamma)
    # solve by bisection on r in (0, |eps|/gamma)
    lo, hi = 1e-300, abs(eps) / gamma * (1.0 - 1e-12)

    def total(r):
        s = math.sqrt(max(eps * eps - (gamma * r) ** 2, 0.0))
        return (1.0 / r + r) * s

    if total(hi) > target:
        raise NoFixedPointError("requested frequency beyond the family's range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if total(mid) > target:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    return gamma * r * r


def energy_phase_jacobian(e1: float, e2: float, psi: float,
                          eps: float, gamma: float, beta: float) -> np.ndarray:
    """Analytic Jacobian of the two-site energy-phase flow at any interior point."""
    if e1 <= 0 or e2 <= 0:
        raise InvalidInputError("Jacobian needs E1, E2 > 0")
    sq = math.sqrt(e1 * e2)
    sn, cs = math.sin(psi), math.cos(psi)
    j = np.empty((3, 3))
    j[0, 0] = eps * math.sqrt(e2 / e1) * sn + 2.0 * beta
    j[0, 1] = eps * math.sqrt(e1 / e2) * sn
    j[0, 2] = 2.0 * eps * sq * cs
    j[1, 0] = -eps * math.sqrt(e2 / e1) * sn
    j[1, 1] = -eps * math.sqrt(e1 / e2) * sn - 2.0 * gamma
    j[1, 2] = -2.0 * eps * sq * cs
    j[2, 0] = -2.0 - eps * cs / sq * (1.0 + (e2 - e1) / (2.0 * e1))
    j[2, 1] = 2.0 + eps * cs / sq * (1.0 - (e2 - e1) / (2.0 * e2))
    j[2, 2] = -(e2 - e1) * eps * sn / sq
    return j


@dataclass
class TwoSiteLinearization:
    jacobian: np.ndarray             # analytic derivative of the flow at the point
    eigenvalues: np.ndarray          # sorted: Re desc, ties Im desc
    fixed_point_matrix: np.ndarray   # closed form valid exactly at the fixed point


def two_site_jacobian(fp: DampedDrivenTwoSite, eps: float, gamma: float,
                      beta: float) -> TwoSiteLinearization:
    """Linearization of the energy-phase flow about a damped-driven fixed point.

    The Jacobian comes from analytic differentiation of the flow; the closed
    fixed-point matrix (entries in terms of eps, gamma, beta only) is returned
    alongside for comparison.
    """
    jac = energy_phase_jacobian(fp.e1, fp.e2, fp.psi, eps, gamma, beta)
    s2 = eps * eps - gamma * beta
    closed = np.array([
        [beta, -gamma, -s2],
        [beta, -gamma, s2],
        [-1.0 + beta / gamma, 1.0 - gamma / beta, beta - gamma],
    ])
    vals = eig_dense(jac, compute_vectors=False).values
    return TwoSiteLinearization(jacobian=jac, eigenvalues=vals,
                                fixed_point_matrix=closed)


def symmetric_decay_phases(eps: float, gamma: float):
    """Constant phases of the two exact equal-energy decay solutions.

    sin(psi) = -gamma/(2 eps) on both; the branch continuing the in-phase
    family is the stable one.  Requires |gamma| <= 2|eps|.
    """
    if eps == 0 or abs(gamma) > 2.0 * abs(eps):
        raise DomainError(f"symmetric decay needs |gamma| <= 2|eps|, got "
                          f"gamma={gamma}, eps={eps}")
    base = math.asin(-gamma / (2.0 * eps))
    return {"in_phase": float(wrap_phase(base)),
            "anti_phase": float(wrap_phase(np.pi - base))}


def symmetric_decay(e0: float, eps: float, gamma: float, t, branch: str = "in_phase"):
    """Exact equal-energy decay: E1 = E2 = e0/2 exp(-gamma t), psi constant.

    Only the in-phase branch is stable.
    """
    phases = symmetric_decay_phases(eps, gamma)
    if branch not in phases:
        raise InvalidInputError(f"branch must be one of {sorted(phases)}")
    t = np.asarray(t, dtype=float)
    e = 0.5 * e0 * np.exp(-gamma * t)
    return e, e.copy(), phases[branch]


def phase_shift_approx(total_energy, eps: float, gamma: float):
    """Slowly-varying phase shift along the decaying asymmetric profile.

    sin(psi) = -sign(eps) gamma / (2 sqrt(E^2 - eps^2)), returned on the
    branch that continues the damped-driven fixed point: near 0 for eps < 0,
    near -pi for eps > 0.  Breaks down once E^2 - eps^2 <= gamma^2/4.
    """
    if eps == 0:
        raise InvalidInputError("phase shift approximation needs eps != 0")
    e = np.asarray(total_energy, dtype=float)
    s2 = e * e - eps * eps
    if np.any(s2 <= 0.25 * gamma * gamma):
        raise ApproximationBreakdownError(
            "phase-shift approximation expired: E^2 - eps^2 <= gamma^2/4")
    root = gamma / (2.0 * np.sqrt(s2))
    if eps > 0:
        psi = wrap_phase(-np.pi + np.arcsin(root))
    else:
        psi = np.arcsin(root)
    if np.ndim(total_energy) == 0:
        return float(psi)
    return psi


def energy_decay_rate(total_energy, eps: float, gamma: float):
    """Slow energy ODE along the asymmetric profile: dE/dt = -gamma (E - sqrt(E^2-eps^2))."""
    e = np.asarray(total_energy, dtype=float)
    return -gamma * (e - np.sqrt(np.maximum(e * e - eps * eps, 0.0)))


def tau(e0: float, eps: float, gamma: float) -> float:
    """Time at which the closed-form energy law reaches E = |eps|."""
    if gamma <= 0:
        raise InvalidInputError(f"tau needs gamma > 0, got {gamma}")
    if eps == 0 or e0 <= abs(eps):
        raise DomainError(f"tau needs E0 > |eps| > 0, got E0={e0}, eps={eps}")
    s0 = math.sqrt(e0 * e0 - eps * eps)
    f0 = e0 + s0
    return (e0 * f0 / (eps * eps) - math.log(f0 / abs(eps)) - 1.0) / (2.0 * gamma)


def energy_evolution(e0: float, eps: float, gamma: float, t):
    """Closed-form total energy E(t) of the decaying asymmetric state.

    Built on the lower Lambert W branch; valid for t < tau(e0, eps, gamma),
    with E(0) = e0 recovered and E(t) -> |eps| as t -> tau.
    """
    horizon = tau(e0, eps, gamma)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr >= horizon):
        raise PastValidityError(
            f"energy law valid only for t < tau = {horizon:.6g}")
    flat = np.atleast_1d(t_arr)
    e = np.empty(flat.shape)
    for i, ti in enumerate(flat):
        w = lambert_w_minus1(-math.exp(-1.0 + 4.0 * gamma * (ti - horizon)))
        u = math.sqrt(-w)
        e[i] = 0.5 * abs(eps) * (u + 1.0 / u)
    if np.ndim(t) == 0:
        return float(e[0])
    return e
