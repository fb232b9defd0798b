"""Dense nonsymmetric eigensolver for the small matrices this package needs.

Pipeline: iterative balancing, Householder reduction to Hessenberg form,
complex single-shift QR iteration with Wilkinson shifts (exceptional shifts
on stalls, 30 n sweep cap), then eigenvectors by inverse iteration on the
Hessenberg matrix.  Problem sizes are 2N <= ~64, so clarity wins over
blocked algorithms throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EigensolverFailureError, InvalidInputError

_EPS = np.finfo(float).eps


@dataclass
class EigenDecomposition:
    values: np.ndarray            # complex, sorted by Re desc then Im desc
    vectors: np.ndarray | None    # column i is the eigenvector of values[i]


def _balance(a):
    """Diagonal similarity scaling by powers of two; returns (balanced, d)."""
    a = a.copy()
    n = a.shape[0]
    d = np.ones(n)
    for _ in range(100):
        changed = False
        for i in range(n):
            c = np.sum(np.abs(a[:, i])) - abs(a[i, i])
            r = np.sum(np.abs(a[i, :])) - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            f = 1.0
            s = c + r
            while c < r / 2.0:
                c *= 2.0
                r /= 2.0
                f *= 2.0
            while c >= r * 2.0:
                c /= 2.0
                r *= 2.0
                f /= 2.0
            if c + r < 0.95 * s:
                changed = True
                d[i] *= f
                a[i, :] /= f
                a[:, i] *= f
        if not changed:
            break
    return a, d


def _hessenberg(a):
    """Householder reduction; returns (H, Q) with a = Q H Q^T."""
    h = a.copy()
    n = h.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        x = h[k + 1:, k]
        sigma = np.linalg.norm(x)
        if sigma == 0.0:
            continue
        alpha = -np.copysign(sigma, x[0]) if x[0] != 0.0 else -sigma
        v = x.copy()
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        h[k + 1:, k:] -= 2.0 * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h, q


def _wilkinson_shift(a, b, c, d):
    """Eigenvalue of [[a, b], [c, d]] closer to d."""
    delta = 0.5 * (a - d)
    s = np.sqrt(delta * delta + b * c + 0j)
    denom = delta + s if abs(delta + s) >= abs(delta - s) else delta - s
    if denom == 0.0:
        return d
    return d - b * c / denom


def _eig_2x2(a, b, c, d):
    tr2 = 0.5 * (a + d)
    disc = np.sqrt(tr2 * tr2 - (a * d - b * c) + 0j)
    l1 = tr2 + disc if abs(tr2 + disc) >= abs(tr2 - disc) else tr2 - disc
    if l1 == 0.0:
        return l1, (a + d) - l1
    return l1, (a * d - b * c) / l1


def _qr_sweep(h, lo, hi, mu):
    """One explicit shifted QR step on the active block h[lo:hi+1, lo:hi+1]."""
    for k in range(lo, hi + 1):
        h[k, k] -= mu
    rotations = []
    for k in range(lo, hi):
        a = h[k, k]
        b = h[k + 1, k]
        r = np.hypot(abs(a), abs(b))
        if r == 0.0:
            c, s = 1.0, 0.0 + 0j
        elif a == 0.0:
            c, s = 0.0, np.conj(b) / abs(b)
        else:
            c = abs(a) / r
            s = (a / abs(a)) * np.conj(b) / r
        rowk = h[k, k:hi + 1].copy()
        rowk1 = h[k + 1, k:hi + 1].copy()
        h[k, k:hi + 1] = c * rowk + s * rowk1
        h[k + 1, k:hi + 1] = -np.conj(s) * rowk + c * rowk1
        rotations.append((c, s))
    for k in range(lo, hi):
        c, s = rotations[k - lo]
        r1 = min(k + 2, hi)
        colk = h[lo:r1 + 1, k].copy()
        colk1 = h[lo:r1 + 1, k + 1].copy()
        h[lo:r1 + 1, k] = c * colk + np.conj(s) * colk1
        h[lo:r1 + 1, k + 1] = -s * colk + c * colk1
    for k in range(lo, hi + 1):
        h[k, k] += mu


def _qr_eigvals(hess, hnorm):
    n = hess.shape[0]
    h = hess.astype(complex)
    vals = []
    hi = n - 1
    stalls = 0
    total = 0
    budget = 30 * n
    while hi >= 0:
        lo = hi
        while lo > 0:
            tst = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if tst == 0.0:
                tst = hnorm
            if abs(h[lo, lo - 1]) <= _EPS * tst:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            vals.append(h[hi, hi])
            hi -= 1
            stalls = 0
            continue
        if lo == hi - 1:
            l1, l2 = _eig_2x2(h[lo, lo], h[lo, hi], h[hi, lo], h[hi, hi])
            vals.extend([l1, l2])
            hi -= 2
            stalls = 0
            continue
        total += 1
        stalls += 1
        if total > budget:
            raise EigensolverFailureError(
                f"QR iteration exceeded {budget} sweeps on a {n}x{n} matrix")
        if stalls % 10 == 0:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi],
                                  h[hi, hi - 1], h[hi, hi])
        _qr_sweep(h, lo, hi, mu)
    return np.array(vals, dtype=complex)


def _canonicalize_real_spectrum(vals):
    """Snap roundoff imaginary parts to zero and symmetrize conjugate pairs."""
    out = vals.copy()
    scale = float(np.max(np.abs(out))) if out.size else 0.0
    if scale == 0.0:
        return out
    im = out.imag.copy()
    im[np.abs(im) <= 32.0 * _EPS * scale] = 0.0
    out = out.real + 1j * im
    cplx = np.where(out.imag != 0.0)[0]
    order = cplx[np.lexsort((out[cplx].imag, np.abs(out[cplx].imag), out[cplx].real))]
    for a, b in zip(order[::2], order[1::2]):
        if abs(out[a] - np.conj(out[b])) <= 1e-10 * scale:
            mean = 0.5 * (out[a] + np.conj(out[b]))
            out[a] = mean
            out[b] = np.conj(mean)
    return out


def _solve_shifted_hessenberg(hess, shift, b, hnorm):
    """Solve (H - shift I) x = b for upper Hessenberg H, adjacent-row pivoting."""
    n = hess.shape[0]
    u = hess - shift * np.eye(n)
    x = b.astype(complex).copy()
    tiny = _EPS * max(hnorm, 1.0)
    for k in range(n - 1):
        if abs(u[k + 1, k]) > abs(u[k, k]):
            u[[k, k + 1], k:] = u[[k + 1, k], k:]
            x[[k, k + 1]] = x[[k + 1, k]]
        piv = u[k, k]
        if piv == 0.0:
            piv = tiny
            u[k, k] = piv
        m = u[k + 1, k] / piv
        if m != 0.0:
            u[k + 1, k + 1:] -= m * u[k, k + 1:]
            x[k + 1] -= m * x[k]
        u[k + 1, k] = 0.0
    for k in range(n - 1, -1, -1):
        piv = u[k, k]
        if piv == 0.0:
            piv = tiny
        x[k] = (x[k] - u[k, k + 1:] @ x[k + 1:]) / piv
    return x


def _eigvec_from_hessenberg(hess, lam, hnorm, n_iters=3):
    n = hess.shape[0]
    hc = hess.astype(complex)
    v = np.full(n, 1.0 / np.sqrt(n), dtype=complex)
    for _ in range(n_iters):
        w = _solve_shifted_hessenberg(hc, lam, v, hnorm)
        nw = np.linalg.norm(w)
        if not np.isfinite(nw) or nw == 0.0:
            break
        v = w / nw
    return v


def _fix_phase(v):
    i = int(np.argmax(np.abs(v)))
    piv = v[i]
    if piv != 0.0:
        v = v * (np.conj(piv) / abs(piv))
    return v


def eig_dense(a, compute_vectors: bool = True,
              residual_tol: float = 1e-9) -> EigenDecomposition:
    """Full spectrum (and optionally right eigenvectors) of a real matrix.

    Eigenvalues are sorted by real part descending, ties broken by imaginary
    part descending, so the small positive mode of a breather linearization
    is addressable deterministically.  Every (lambda, v) pair is verified to
    satisfy ||A v - lambda v|| <= residual_tol ||A|| ||v||.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix entries must be finite")
    n = a.shape[0]
    if n == 0:
        return EigenDecomposition(values=np.empty(0, complex),
                                  vectors=np.empty((0, 0), complex) if compute_vectors else None)
    if n == 1:
        vals = np.array([a[0, 0] + 0j])
        vecs = np.array([[1.0 + 0j]]) if compute_vectors else None
        return EigenDecomposition(values=vals, vectors=vecs)

    balanced, d = _balance(a)
    hess, q = _hessenberg(balanced)
    hnorm = float(np.linalg.norm(hess, ord="fro"))
    if hnorm == 0.0:
        vals = np.zeros(n, dtype=complex)
        vecs = np.eye(n, dtype=complex) if compute_vectors else None
        return EigenDecomposition(values=vals, vectors=vecs)

    vals = _qr_eigvals(hess, hnorm)
    vals = _canonicalize_real_spectrum(vals)
    order = np.lexsort((-vals.imag, -vals.real))
    vals = vals[order]

    vectors = None
    if compute_vectors:
        anorm = float(np.linalg.norm(a, ord="fro"))
        vectors = np.empty((n, n), dtype=complex)
        for i, lam in enumerate(vals):
            v = _eigvec_from_hessenberg(hess, lam, hnorm)
            va = d * (q @ v)
            va /= np.linalg.norm(va)
            res = np.linalg.norm(a @ va - lam * va)
            if residual_tol is not None and res > residual_tol * anorm:
                # one refinement pass: Rayleigh-quotient shift for the solve
                lam_r = complex(np.vdot(va, a @ va))
                v = _eigvec_from_hessenberg(hess, lam_r, hnorm, n_iters=4)
                va = d * (q @ v)
                va /= np.linalg.norm(va)
                res = np.linalg.norm(a @ va - lam * va)
                if res > residual_tol * anorm:
                    raise EigensolverFailureError(
                        f"eigenvector residual {res:.3e} exceeds "
                        f"{residual_tol:.1e} * ||A|| for eigenvalue {lam}")
            vectors[:, i] = _fix_phase(va)
    return EigenDecomposition(values=vals, vectors=vectors)
