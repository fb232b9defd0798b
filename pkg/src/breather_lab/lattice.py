"""Finite dNLS chain with a driven first site and a damped last site.

The chain lives in a frame rotating at frequency ``omega``.  Two coordinate
systems are supported: Cartesian ``(p, q)`` (real and imaginary parts of the
complex site amplitudes) and energy-phase ``(E_j, psi_j)`` where ``E_j`` is
the energy of site ``j`` and ``psi_j`` the phase difference between sites
``j+1`` and ``j``.  The discrete Laplacian uses free ends: site 1 sees
``x_2 - x_1``, site N sees ``x_{N-1} - x_N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, SingularStateError

TWO_PI = 2.0 * np.pi


def wrap_phase(psi):
    """Wrap angles into (-pi, pi]."""
    psi = np.asarray(psi, dtype=float)
    w = psi % TWO_PI
    w = np.where(w > np.pi, w - TWO_PI, w)
    if w.ndim == 0:
        return float(w)
    return w


@dataclass(frozen=True)
class LatticeParams:
    """Chain size and the four scalars defining the flow.

    ``eps`` is the inter-site coupling (may be negative), ``gamma`` the
    damping at site N, ``beta`` the driving at site 1, ``omega`` the
    rotating-frame frequency.
    """

    n_sites: int
    eps: float
    gamma: float = 0.0
    beta: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise InvalidInputError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        for name in ("eps", "gamma", "beta", "omega"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidInputError(f"{name} must be finite")
        if self.gamma < 0:
            raise InvalidInputError(f"gamma must be >= 0, got {self.gamma}")
        if self.beta < 0:
            raise InvalidInputError(f"beta must be >= 0, got {self.beta}")
        if self.omega <= 0:
            raise InvalidInputError(f"omega must be > 0, got {self.omega}")

    def as_array(self):
        """Pack (eps, gamma, beta, omega) for array-based kernels."""
        return np.array([self.eps, self.gamma, self.beta, self.omega], dtype=float)

    def replace(self, **kwargs):
        fields = dict(n_sites=self.n_sites, eps=self.eps, gamma=self.gamma,
                      beta=self.beta, omega=self.omega)
        fields.update(kwargs)
        return LatticeParams(**fields)


def _readonly(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class CartesianState:
    """Real coordinates (p_j, q_j) of the full chain."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _readonly(self.p))
        object.__setattr__(self, "q", _readonly(self.q))
        if self.p.ndim != 1 or self.q.ndim != 1 or self.p.size != self.q.size:
            raise InvalidInputError("p and q must be 1-D arrays of equal length")

    @property
    def n_sites(self) -> int:
        return self.p.size

    def as_vector(self) -> np.ndarray:
        """Flat layout (p_1..p_N, q_1..q_N) used by the numerical kernels."""
        return np.concatenate([self.p, self.q])

    @classmethod
    def from_vector(cls, y) -> "CartesianState":
        y = np.asarray(y, dtype=float)
        n = y.size // 2
        return cls(p=y[:n], q=y[n:])

    def rotated(self, theta: float) -> "CartesianState":
        """Rotate every site by the global phase theta."""
        c, s = np.cos(theta), np.sin(theta)
        return CartesianState(p=c * self.p - s * self.q, q=s * self.p + c * self.q)

    def site_energies(self) -> np.ndarray:
        return 0.5 * (self.p**2 + self.q**2)


@dataclass(frozen=True)
class EnergyPhaseState:
    """Per-site energies and adjacent phase differences, psi wrapped to (-pi, pi]."""

    energies: np.ndarray
    phase_diffs: np.ndarray

    def __post_init__(self):
        e = np.array(self.energies, dtype=float)
        psi = np.asarray(self.phase_diffs, dtype=float)
        if e.ndim != 1 or psi.ndim != 1 or psi.size != e.size - 1:
            raise InvalidInputError("need N energies and N-1 phase differences")
        if np.any(e < 0):
            raise InvalidInputError("site energies must be >= 0")
        object.__setattr__(self, "energies", _readonly(e))
        object.__setattr__(self, "phase_diffs", _readonly(wrap_phase(psi)))

    @property
    def n_sites(self) -> int:
        return self.energies.size


def cartesian_rhs(t, y, args):
    """Flat rotating-frame vector field; args = (eps, gamma, beta, omega).

    Written with numba-compatible constructs so the same source can be
    compiled for long runs.  Layout matches CartesianState.as_vector().
    """
    n = y.shape[0] // 2
    eps = args[0]
    gamma = args[1]
    beta = args[2]
    omega = args[3]
    p = y[:n]
    q = y[n:]
    out = np.empty(2 * n)
    lap_p = np.empty(n)
    lap_q = np.empty(n)
    lap_p[0] = p[1] - p[0]
    lap_q[0] = q[1] - q[0]
    lap_p[n - 1] = p[n - 2] - p[n - 1]
    lap_q[n - 1] = q[n - 2] - q[n - 1]
    for j in range(1, n - 1):
        lap_p[j] = p[j + 1] + p[j - 1] - 2.0 * p[j]
        lap_q[j] = q[j + 1] + q[j - 1] - 2.0 * q[j]
    for j in range(n):
        amp2 = p[j] * p[j] + q[j] * q[j]
        out[j] = eps * lap_q[j] + omega * q[j] - amp2 * q[j]
        out[n + j] = -eps * lap_p[j] - omega * p[j] + amp2 * p[j]
    out[0] += beta * p[0]
    out[n] += beta * q[0]
    out[n - 1] -= gamma * p[n - 1]
    out[2 * n - 1] -= gamma * q[n - 1]
    return out


def vector_field_cartesian(state: CartesianState, params: LatticeParams) -> CartesianState:
    """Time derivative (p_dot, q_dot) of the rotating-frame flow."""
    if state.n_sites != params.n_sites:
        raise InvalidInputError(
            f"state has {state.n_sites} sites, params expect {params.n_sites}")
    dy = cartesian_rhs(0.0, state.as_vector(), params.as_array())
    return CartesianState.from_vector(dy)


def _phase_velocities(e, psi, eps, omega):
    """Rotating-frame phase velocity of every site (free-end chain)."""
    n = e.size
    phi_dot = 2.0 * e - omega
    nbrs = np.full(n, 2.0)
    nbrs[0] = 1.0
    nbrs[-1] = 1.0
    coupling = np.zeros(n)
    cos_psi = np.cos(psi)
    coupling[:-1] += np.sqrt(e[1:] / e[:-1]) * cos_psi          # right neighbor
    coupling[1:] += np.sqrt(e[:-1] / e[1:]) * cos_psi           # left neighbor
    phi_dot -= eps * (coupling - nbrs)
    return phi_dot


def vector_field_energy_phase(state: EnergyPhaseState, params: LatticeParams):
    """Time derivative (E_dot, psi_dot) of the energy-phase flow.

    Returns plain arrays: derivatives are not wrappable angles or
    nonnegative energies, so they do not form an EnergyPhaseState.
    Requires every E_j > 0; at a zero-amplitude site the phase difference
    is undefined and the caller must switch to Cartesian coordinates.
    """
    if state.n_sites != params.n_sites:
        raise InvalidInputError(
            f"state has {state.n_sites} sites, params expect {params.n_sites}")
    e = state.energies
    psi = state.phase_diffs
    if np.any(e <= 0):
        raise SingularStateError("energy-phase flow undefined at zero-amplitude site")
    bond_flux = 2.0 * params.eps * np.sqrt(e[:-1] * e[1:]) * np.sin(psi)
    de = np.zeros_like(e)
    de[:-1] += bond_flux   # each site gains through its right bond
    de[1:] -= bond_flux    # and loses through its left bond
    de[0] += 2.0 * params.beta * e[0]
    de[-1] -= 2.0 * params.gamma * e[-1]
    dpsi = np.diff(_phase_velocities(e, psi, params.eps, params.omega))
    return de, dpsi


def cartesian_to_energy_phase(state: CartesianState) -> EnergyPhaseState:
    """E_j = (p_j^2+q_j^2)/2 and wrapped phase differences psi_j."""
    e = state.site_energies()
    if np.any(e <= 0):
        raise SingularStateError("zero-amplitude site: phase undefined")
    phi = np.arctan2(state.q, state.p)
    return EnergyPhaseState(energies=e, phase_diffs=wrap_phase(np.diff(phi)))


def energy_phase_to_cartesian(state: EnergyPhaseState, phi1: float = 0.0) -> CartesianState:
    """Inverse map; the gauge freedom is fixed by the phase of site 1."""
    r = np.sqrt(2.0 * state.energies)
    phi = phi1 + np.concatenate([[0.0], np.cumsum(state.phase_diffs)])
    return CartesianState(p=r * np.cos(phi), q=r * np.sin(phi))


def instantaneous_frequency(state: EnergyPhaseState, params: LatticeParams) -> float:
    """Lab-frame rotation rate of site 1: 2 E_1 + eps - eps sqrt(E_2/E_1) cos psi_1."""
    e1 = state.energies[0]
    e2 = state.energies[1]
    if e1 <= 0:
        raise SingularStateError("instantaneous frequency undefined at E_1 <= 0")
    coupling = 0.0
    if e2 > 0:
        coupling = np.sqrt(e2 / e1) * np.cos(state.phase_diffs[0])
    return float(2.0 * e1 + params.eps - params.eps * coupling)


def field_jacobian(p, q, params: LatticeParams) -> np.ndarray:
    """Analytic 2N x 2N Jacobian of the Cartesian vector field.

    Block layout [[D1, A], [B, D2]] in (p_1..p_N, q_1..q_N) ordering:
    A and B are tridiagonal, D1 and D2 diagonal.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n = params.n_sites
    if p.size != n or q.size != n:
        raise InvalidInputError("state dimensions do not match params")
    eps, gamma, beta, omega = params.eps, params.gamma, params.beta, params.omega

    a_ends = np.full(n, 2.0)
    a_ends[0] = 1.0
    a_ends[-1] = 1.0

    d1 = -2.0 * p * q
    d1[0] += beta
    d1[-1] -= gamma
    d2 = 2.0 * p * q
    d2[0] += beta
    d2[-1] -= gamma

    a_diag = omega - a_ends * eps - p**2 - 3.0 * q**2
    b_diag = -omega + a_ends * eps + 3.0 * p**2 + q**2

    jac = np.zeros((2 * n, 2 * n))
    idx = np.arange(n)
    jac[idx, idx] = d1
    jac[n + idx, n + idx] = d2
    jac[idx, n + idx] = a_diag
    jac[n + idx, idx] = b_diag
    off = np.arange(n - 1)
    jac[off, n + off + 1] = eps
    jac[off + 1, n + off] = eps
    jac[n + off, off + 1] = -eps
    jac[n + off + 1, off] = -eps
    return jac
