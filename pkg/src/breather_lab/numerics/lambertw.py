"""Lower real branch W_-1 of the Lambert W function on [-1/e, 0)."""

from __future__ import annotations

import math

from ..errors import DomainError

_INV_E = math.exp(-1.0)


def _halley(w, x, max_iters=60):
    # Halley iteration on f(w) = w e^w - x.
    for _ in range(max_iters):
        ew = math.exp(w)
        f = w * ew - x
        tol = 1e-14 * max(abs(x), 1e-30)
        if abs(f) <= tol:
            return w
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        w_new = w - f / denom
        if w_new > -1.0:
            # stay on the lower branch
            w_new = 0.5 * (w - 1.0)
        if w_new == w:
            return w
        w = w_new
    ew = math.exp(w)
    if abs(w * ew - x) <= 1e-13 * max(abs(x), 1e-30):
        return w
    raise DomainError(f"lambert_w_minus1 failed to converge at x={x!r}")


def lambert_w_minus1(x: float) -> float:
    """Solve w e^w = x for the branch w <= -1.

    Initial guess from the asymptotic series w ~ ln(-x) - ln(-ln(-x)) away
    from the branch point, from the square-root series near it; refined by
    Halley iteration to |w e^w - x| <= 1e-14 max(|x|, 1e-30).
    """
    x = float(x)
    if not (-_INV_E <= x < 0.0):
        raise DomainError(f"lambert_w_minus1 needs -1/e <= x < 0, got {x!r}")
    if x == -_INV_E:
        return -1.0

    p2 = 2.0 * (math.e * x + 1.0)
    if p2 < 0.02:
        # branch-point series: W_-1 = -1 - p - p^2/3 - 11 p^3/72 - ...
        p = math.sqrt(max(p2, 0.0))
        w0 = -1.0 - p - p * p / 3.0 - 11.0 * p**3 / 72.0
        w0 = min(w0, -1.0 - 1e-300)
    else:
        l1 = math.log(-x)
        l2 = math.log(-l1)
        # two asymptotic correction terms keep Halley in its quadratic basin
        w0 = l1 - l2 + l2 / l1 + l2 * (l2 - 2.0) / (2.0 * l1 * l1)
    return _halley(w0, x)
