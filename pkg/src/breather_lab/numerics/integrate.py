"""Adaptive Dormand-Prince 5(4) and fixed-step RK4 integration.

Two drivers share the same tableau and PI step controller: a plain-Python
loop that supports an observer callback, and a numba-compilable core used
automatically when the right-hand side is itself a compiled dispatcher
(long metastability runs).  Dense output between accepted steps is cubic
Hermite, which is far below the step error at the tolerances used here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import IntegrationFailureError, InvalidInputError

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
# fifth-order weights minus the embedded fourth-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_ALPHA = 0.17   # error exponent, 1/5 reduced by the PI term
_BETA_PI = 0.04


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = np.inf
    initial_step: float = 0.0     # 0 means choose automatically
    method: str = "adaptive_rk45"

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise InvalidInputError("tolerances must be > 0")
        if self.max_step <= 0:
            raise InvalidInputError("max_step must be > 0")
        if self.method not in ("adaptive_rk45", "fixed_rk4"):
            raise InvalidInputError(f"unknown method {self.method!r}")


@dataclass
class IntegrationResult:
    t: float
    y: np.ndarray
    ts: np.ndarray
    ys: np.ndarray
    n_accepted: int
    n_rejected: int


def _hermite(theta, h, y0, f0, y1, f1):
    return ((1.0 - theta) * y0 + theta * y1
            + theta * (theta - 1.0) * ((1.0 - 2.0 * theta) * (y1 - y0)
                                       + (theta - 1.0) * h * f0 + theta * h * f1))


def _initial_step(fun, t0, y0, f0, t1, rtol, atol, max_step):
    sc = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / sc) ** 2))
    d1 = np.sqrt(np.mean((f0 / sc) ** 2))
    h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h = min(h, t1 - t0, max_step)
    f1 = fun(t0 + h, y0 + h * f0)
    d2 = np.sqrt(np.mean(((f1 - f0) / sc) ** 2)) / h
    dm = max(d1, d2)
    if dm > 1e-15:
        h = min(100.0 * h, dm ** -0.2 * 0.01 ** 0.2, t1 - t0, max_step)
    else:
        h = min(max(1e-6, 100.0 * h), t1 - t0, max_step)
    return h


def _adaptive_py(fun, y0, t0, t1, rtol, atol, max_step, h_init, t_eval, observer):
    y = y0.copy()
    t = t0
    f0 = fun(t, y)
    m = t_eval.size
    ys = np.empty((m, y.size))
    idx = 0
    while idx < m and t_eval[idx] <= t0:
        ys[idx] = y
        idx += 1
    h = h_init if h_init > 0 else _initial_step(fun, t0, y0, f0, t1, rtol, atol, max_step)
    errold = 1e-4
    n_acc = 0
    n_rej = 0
    while t < t1:
        h = min(h, max_step, t1 - t)
        if h < 1e-14 * max(1.0, abs(t)):
            raise IntegrationFailureError(
                f"step size underflow at t={t:.6g}", t, y.copy(),
                times=t_eval[:idx].copy(), states=ys[:idx].copy())
        k1 = f0
        k2 = fun(t + _C2 * h, y + h * (_A21 * k1))
        k3 = fun(t + _C3 * h, y + h * (_A31 * k1 + _A32 * k2))
        k4 = fun(t + _C4 * h, y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = fun(t + _C5 * h, y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = fun(t + h, y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
        y_new = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = fun(t + h, y_new)
        err_vec = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / sc) ** 2)))
        if err <= 1.0:
            t_next = t + h
            while idx < m and t_eval[idx] <= t_next + 1e-12 * max(1.0, abs(t_next)):
                theta = min((t_eval[idx] - t) / h, 1.0)
                ys[idx] = _hermite(theta, h, y, k1, y_new, k7)
                idx += 1
            t = t_next
            y = y_new
            f0 = k7
            n_acc += 1
            if observer is not None:
                observer(t, y.copy())
            fac = _MAX_FACTOR if err == 0.0 else min(
                _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * errold**_BETA_PI / err**_ALPHA))
            errold = max(err, 1e-4)
            h = h * fac
        else:
            n_rej += 1
            h = h * max(_MIN_FACTOR, _SAFETY / err**_ALPHA)
    while idx < m:
        ys[idx] = y
        idx += 1
    return t, y, ys, n_acc, n_rej


def _adaptive_core_impl(f, y0, t0, t1, rtol, atol, max_step, h_init, t_eval, args):
    """Observer-free driver, numba-compilable; f has signature f(t, y, args)."""
    y = y0.copy()
    t = t0
    f0 = f(t, y, args)
    m = t_eval.shape[0]
    ys = np.empty((m, y.shape[0]))
    idx = 0
    while idx < m and t_eval[idx] <= t0:
        ys[idx] = y
        idx += 1
    if h_init > 0.0:
        h = h_init
    else:
        sc = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean((y / sc) ** 2))
        d1 = np.sqrt(np.mean((f0 / sc) ** 2))
        if d0 < 1e-5 or d1 < 1e-5:
            h = 1e-6
        else:
            h = 0.01 * d0 / d1
        h = min(h, t1 - t0, max_step)
        f1 = f(t0 + h, y + h * f0, args)
        d2 = np.sqrt(np.mean(((f1 - f0) / sc) ** 2)) / h
        dm = max(d1, d2)
        if dm > 1e-15:
            h = min(100.0 * h, (0.01 / dm) ** 0.2, t1 - t0, max_step)
        else:
            h = min(max(1e-6, 100.0 * h), t1 - t0, max_step)
    errold = 1e-4
    n_acc = 0
    n_rej = 0
    status = 0
    while t < t1:
        h = min(h, max_step, t1 - t)
        if h < 1e-14 * max(1.0, abs(t)):
            status = 1
            break
        k1 = f0
        k2 = f(t + _C2 * h, y + h * (_A21 * k1), args)
        k3 = f(t + _C3 * h, y + h * (_A31 * k1 + _A32 * k2), args)
        k4 = f(t + _C4 * h, y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3), args)
        k5 = f(t + _C5 * h, y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4), args)
        k6 = f(t + h, y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5),
               args)
        y_new = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = f(t + h, y_new, args)
        err_vec = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean((err_vec / sc) ** 2))
        if err <= 1.0:
            t_next = t + h
            while idx < m and t_eval[idx] <= t_next + 1e-12 * max(1.0, abs(t_next)):
                theta = (t_eval[idx] - t) / h
                if theta > 1.0:
                    theta = 1.0
                ys[idx] = ((1.0 - theta) * y + theta * y_new
                           + theta * (theta - 1.0) * ((1.0 - 2.0 * theta) * (y_new - y)
                                                      + (theta - 1.0) * h * k1
                                                      + theta * h * k7))
                idx += 1
            t = t_next
            y = y_new
            f0 = k7
            n_acc += 1
            if err == 0.0:
                fac = _MAX_FACTOR
            else:
                fac = _SAFETY * errold**_BETA_PI / err**_ALPHA
                if fac > _MAX_FACTOR:
                    fac = _MAX_FACTOR
                if fac < _MIN_FACTOR:
                    fac = _MIN_FACTOR
            errold = max(err, 1e-4)
            h = h * fac
        else:
            n_rej += 1
            fac = _SAFETY / err**_ALPHA
            if fac < _MIN_FACTOR:
                fac = _MIN_FACTOR
            h = h * fac
    if status == 0:
        while idx < m:
            ys[idx] = y
            idx += 1
    return status, t, y, ys, n_acc, n_rej, idx


_COMPILED_CORE = None


def _compiled_core():
    global _COMPILED_CORE
    if _COMPILED_CORE is None:
        import numba
        _COMPILED_CORE = numba.njit(cache=False)(_adaptive_core_impl)
    return _COMPILED_CORE


def is_compiled_rhs(f) -> bool:
    """True if f is a numba dispatcher (enables the compiled driver)."""
    try:
        from numba.core.dispatcher import Dispatcher
    except Exception:
        return False
    return isinstance(f, Dispatcher)


def _fixed_rk4(fun, y0, t0, t1, h_step, t_eval, observer):
    y = y0.copy()
    t = t0
    m = t_eval.size
    ys = np.empty((m, y.size))
    idx = 0
    while idx < m and t_eval[idx] <= t0:
        ys[idx] = y
        idx += 1
    n_steps = 0
    while t < t1:
        h = min(h_step, t1 - t)
        k1 = fun(t, y)
        k2 = fun(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = fun(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = fun(t + h, y + h * k3)
        y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        f_new = fun(t + h, y_new)
        t_next = t + h
        while idx < m and t_eval[idx] <= t_next + 1e-12 * max(1.0, abs(t_next)):
            theta = min((t_eval[idx] - t) / h, 1.0)
            ys[idx] = _hermite(theta, h, y, k1, y_new, f_new)
            idx += 1
        t = t_next
        y = y_new
        n_steps += 1
        if observer is not None:
            observer(t, y.copy())
    while idx < m:
        ys[idx] = y
        idx += 1
    return t, y, ys, n_steps


def integrate(f, y0, t_span, cfg: IntegratorConfig | None = None,
              observer=None, t_eval=None, args=None) -> IntegrationResult:
    """Integrate y' = f(t, y) over t_span, sampling at t_eval.

    ``f`` takes (t, y) or, when ``args`` is given, (t, y, args).  If ``f``
    is a numba-compiled dispatcher and no observer is supplied, a compiled
    driver runs the whole loop.  The observer is called as observer(t, y)
    after every accepted step and must not mutate its arguments.
    """
    cfg = cfg or IntegratorConfig()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise InvalidInputError(f"t_span must be increasing, got {t_span}")
    y0 = np.asarray(y0, dtype=float)
    if y0.ndim != 1:
        raise InvalidInputError("y0 must be a 1-D array")

    if args is None:
        fun = lambda t, y: np.asarray(f(t, y), dtype=float)
    else:
        args_arr = np.asarray(args, dtype=float)
        fun = lambda t, y: np.asarray(f(t, y, args_arr), dtype=float)

    f_probe = fun(t0, y0)
    if f_probe.shape != y0.shape:
        raise InvalidInputError(
            f"vector field dimension {f_probe.shape} does not match y0 {y0.shape}")

    if t_eval is None:
        te = np.empty(0)
    else:
        te = np.asarray(t_eval, dtype=float)
        slack = 1e-9 * max(1.0, abs(t0), abs(t1))
        if te.size and (np.any(np.diff(te) < 0) or te[0] < t0 - slack or te[-1] > t1 + slack):
            raise InvalidInputError("t_eval must be sorted and inside t_span")

    if cfg.method == "fixed_rk4":
        if not np.isfinite(cfg.max_step):
            raise InvalidInputError("fixed_rk4 uses max_step as its step size; must be finite")
        t, y, ys, n_steps = _fixed_rk4(fun, y0, t0, t1, cfg.max_step, te, observer)
        return IntegrationResult(t=t, y=y, ts=te.copy(), ys=ys,
                                 n_accepted=n_steps, n_rejected=0)

    if observer is None and is_compiled_rhs(f):
        args_arr = np.asarray(args, dtype=float) if args is not None else np.empty(0)
        core = _compiled_core()
        status, t, y, ys, n_acc, n_rej, idx = core(
            f, y0.copy(), t0, t1, cfg.rel_tol, cfg.abs_tol, cfg.max_step,
            cfg.initial_step, te, args_arr)
        if status != 0:
            raise IntegrationFailureError(
                f"step size underflow at t={t:.6g}", t, y,
                times=te[:idx].copy(), states=ys[:idx].copy())
        return IntegrationResult(t=t, y=y, ts=te.copy(), ys=ys,
                                 n_accepted=n_acc, n_rejected=n_rej)

    t, y, ys, n_acc, n_rej = _adaptive_py(
        fun, y0, t0, t1, cfg.rel_tol, cfg.abs_tol, cfg.max_step,
        cfg.initial_step, te, observer)
    return IntegrationResult(t=t, y=y, ts=te.copy(), ys=ys,
                             n_accepted=n_acc, n_rejected=n_rej)
