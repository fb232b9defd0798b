"""Linearization about a breather: spectrum, tangent frame, mode decomposition.

The linearization of the rotating-frame flow at a breather has one zero
eigenvalue (global rotation), one small positive eigenvalue lambda2 that
drives the slow slide along the breather family, and 2N-2 eigenvalues near
+-i omega with strictly negative real parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .breather import Breather, solve_from_seed
from .errors import BasisDegenerateError, SpectrumAnomalyError
from .lattice import LatticeParams, field_jacobian
from .numerics import NewtonConfig, eig_dense


def lambda2_leading(params: LatticeParams) -> float:
    """Leading-order small positive eigenvalue 2(2N-2) gamma eps^(2N-2) (omega=1 form)."""
    n = params.n_sites
    return 2.0 * (2 * n - 2) * params.gamma * params.eps ** (2 * n - 2)


def jacobian_at(breather: Breather) -> np.ndarray:
    """Exact analytic Jacobian of the full vector field at the breather."""
    return field_jacobian(breather.state.p, breather.state.q, breather.params)


def _deflated_eigensystem(jac, rotation_mode):
    """Eigendecomposition with the known rotation mode deflated first.

    The rotation eigenvector (-q*, p*) has eigenvalue zero up to the Newton
    residual, and the small positive mode is almost parallel to it, so the
    pair is nearly defective: raw QR (or any backward-stable solver) smears
    both eigenvalues by ~sqrt(machine eps).  Reflecting the exact rotation
    mode onto the first axis splits the spectrum into the tiny (1,1) entry
    and a well-conditioned trailing block.
    """
    n2 = jac.shape[0]
    u = rotation_mode / np.linalg.norm(rotation_mode)
    w = u.copy()
    w[0] -= 1.0
    wn = np.linalg.norm(w)
    if wn < 1e-8:
        m = jac.copy()
        house = None
    else:
        w /= wn
        house = np.eye(n2) - 2.0 * np.outer(w, w)
        m = house @ jac @ house
    lam0 = complex(m[0, 0])
    c1 = m[0, 1:]
    block = m[1:, 1:]
    dec = eig_dense(block)
    values = np.empty(n2, dtype=complex)
    vectors = np.empty((n2, n2), dtype=complex)
    values[0] = lam0
    vectors[0, 0] = 1.0
    vectors[1:, 0] = 0.0
    for k in range(n2 - 1):
        lam = dec.values[k]
        wv = dec.vectors[:, k]
        denom = lam - lam0
        xi = (c1 @ wv) / denom if denom != 0.0 else 0.0
        values[k + 1] = lam
        vectors[0, k + 1] = xi
        vectors[1:, k + 1] = wv
    if house is not None:
        vectors = house @ vectors
    vectors /= np.linalg.norm(vectors, axis=0, keepdims=True)
    order = np.lexsort((-values.imag, -values.real))
    return values[order], vectors[:, order]


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray          # sorted: Re desc, ties Im desc
    eigenvectors: np.ndarray         # column i belongs to eigenvalues[i]
    zero_mode_residual: float        # |lambda| of the mode nearest zero
    lambda2: float | None            # the small positive eigenvalue
    lambda2_predicted: float         # 2(2N-2) gamma eps^(2N-2)
    zero_index: int
    lambda2_index: int | None
    degenerate: bool = False         # gamma=0 Jordan block at zero
    mu: np.ndarray | None = None     # filled by decompose_small_mode


def spectrum(breather: Breather, lambda2_bound: float = 1e-2,
             imag_tol: float = 1e-8, degenerate_tol: float = 1e-10) -> SpectrumReport:
    """Full eigendecomposition of the linearization, with mode classification.

    lambda2 is identified as the unique real eigenvalue in (0, lambda2_bound)
    other than the zero mode.  With gamma = 0 the zero eigenvalue is double
    (one eigenvector only): both members of the pair land at roundoff scale
    and the report is flagged degenerate instead.  The same flag is raised
    whenever lambda2 would fall below degenerate_tol, i.e. too small to
    separate from the rotation mode in double precision.
    """
    jac = jacobian_at(breather)
    rotation = np.concatenate([-breather.state.q, breather.state.p])
    vals, vecs = _deflated_eigensystem(jac, rotation)
    zero_index = int(np.argmin(np.abs(vals)))
    zero_residual = float(np.abs(vals[zero_index]))

    second_smallest = float(np.sort(np.abs(vals))[1])
    if breather.params.gamma == 0.0 or second_smallest < degenerate_tol:
        return SpectrumReport(eigenvalues=vals, eigenvectors=vecs,
                              zero_mode_residual=zero_residual, lambda2=None,
                              lambda2_predicted=lambda2_leading(breather.params),
                              zero_index=zero_index, lambda2_index=None,
                              degenerate=True)

    candidates = [i for i in range(vals.size)
                  if i != zero_index
                  and abs(vals[i].imag) < imag_tol
                  and 0.0 < vals[i].real < lambda2_bound]
    if len(candidates) != 1:
        raise SpectrumAnomalyError(
            f"expected exactly one small positive real eigenvalue, found "
            f"{len(candidates)}", vals)
    lam2_index = candidates[0]
    return SpectrumReport(eigenvalues=vals, eigenvectors=vecs,
                          zero_mode_residual=zero_residual,
                          lambda2=float(vals[lam2_index].real),
                          lambda2_predicted=lambda2_leading(breather.params),
                          zero_index=zero_index, lambda2_index=lam2_index)


@dataclass
class TangentFrame:
    """Tangent directions of the breather cylinder and their dual vectors.

    v1 = (-q*, p*) spans global rotation; v2_tilde = d(p*, q*)/d omega spans
    frequency change.  The duals n1_tilde, n2 are normalized so that
    <n1_tilde, v1> = <n2, v2_tilde> = 1; cross pairings are tiny.
    """

    v1: np.ndarray
    v2_tilde: np.ndarray
    n1_tilde: np.ndarray
    n2: np.ndarray
    c1: float
    c2: float
    d_beta_d_omega: float
    d_omega: float


def tangent_frame(breather: Breather, d_omega: float = 1e-5,
                  newton_cfg: NewtonConfig | None = None) -> TangentFrame:
    """Build the cylinder tangent frame at a breather.

    The omega-derivative is a centered difference of two extra Newton solves
    at omega +- d_omega, each seeded from the given breather.
    """
    p = breather.state.p
    q = breather.state.q
    v1 = np.concatenate([-q, p])

    plus, _ = solve_from_seed(breather.state, breather.params.beta,
                              breather.params.replace(omega=breather.omega + d_omega),
                              newton_cfg)
    minus, _ = solve_from_seed(breather.state, breather.params.beta,
                               breather.params.replace(omega=breather.omega - d_omega),
                               newton_cfg)
    v2 = (plus.state.as_vector() - minus.state.as_vector()) / (2.0 * d_omega)
    d_beta = (plus.params.beta - minus.params.beta) / (2.0 * d_omega)

    dp = v2[:p.size]
    dq = v2[p.size:]
    pairing = float(p @ dp - q @ dq)
    if pairing == 0.0:
        raise BasisDegenerateError("tangent frame normalization vanished")
    c = 1.0 / pairing
    n1 = c * np.concatenate([dq, dp])
    n2 = c * np.concatenate([p, -q])
    return TangentFrame(v1=v1, v2_tilde=v2, n1_tilde=n1, n2=n2,
                        c1=c, c2=c, d_beta_d_omega=d_beta, d_omega=d_omega)


def tangent_plane_angle(frame: TangentFrame, vec: np.ndarray) -> float:
    """Angle (radians) between vec and span{v1, v2_tilde}."""
    basis = np.column_stack([frame.v1, frame.v2_tilde])
    coeffs, *_ = np.linalg.lstsq(basis, vec, rcond=None)
    resid = vec - basis @ coeffs
    return float(np.arcsin(min(1.0, np.linalg.norm(resid) / np.linalg.norm(vec))))


def decompose_small_mode(breather: Breather, frame: TangentFrame,
                         report: SpectrumReport,
                         cond_limit: float = 1e12) -> np.ndarray:
    """Expand the lambda2 eigenvector in the basis {v1, v2_tilde, v3..v2N}.

    Returns the coefficients [mu_2, |mu_3|, ..., |mu_2N|] normalized so the
    v1 coefficient equals one, and stores them on report.mu.  mu_2 multiplies
    the along-family direction v2_tilde; the magnitudes for j >= 3 measure
    leakage into the oscillatory eigendirections.
    """
    if report.lambda2_index is None:
        raise SpectrumAnomalyError("no small positive mode to decompose "
                                   "(degenerate spectrum)", report.eigenvalues)
    n2 = report.eigenvalues.size
    others = [i for i in range(n2)
              if i not in (report.zero_index, report.lambda2_index)]
    basis = np.empty((n2, n2), dtype=complex)
    basis[:, 0] = frame.v1
    basis[:, 1] = frame.v2_tilde
    for k, i in enumerate(others):
        basis[:, 2 + k] = report.eigenvectors[:, i]
    cond = np.linalg.cond(basis)
    if not np.isfinite(cond) or cond > cond_limit:
        raise BasisDegenerateError(f"decomposition basis condition number {cond:.3e}")

    v2 = report.eigenvectors[:, report.lambda2_index]
    # the lambda2 eigenvector of a real matrix is real up to a phase
    v2 = np.real(v2) if np.max(np.abs(v2.imag)) < 1e-8 else v2
    coeffs = np.linalg.solve(basis, v2.astype(complex))
    coeffs = coeffs / coeffs[0]
    mu = np.empty(n2 - 1)
    mu[0] = coeffs[1].real
    mu[1:] = np.abs(coeffs[2:])
    report.mu = mu
    return mu
