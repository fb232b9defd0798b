"""Damped Newton iteration with LU linear solves and a halving line search."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError, NoConvergenceError, SingularJacobianError


@dataclass(frozen=True)
class NewtonConfig:
    residual_tol: float = 1e-12      # max-norm of the residual at acceptance
    max_iters: int = 40
    damping_min: float = 1.0 / 1024  # smallest line-search factor

    def __post_init__(self):
        if self.residual_tol <= 0:
            raise InvalidInputError("residual_tol must be > 0")
        if self.max_iters < 1:
            raise InvalidInputError("max_iters must be >= 1")
        if not (0.0 < self.damping_min <= 1.0):
            raise InvalidInputError("damping_min must be in (0, 1]")


@dataclass
class NewtonResult:
    x: np.ndarray
    residual_norm: float
    iterations: int
    residual_history: list = field(default_factory=list)


def newton_solve(F, jac, x0, cfg: NewtonConfig | None = None) -> NewtonResult:
    """Solve F(x) = 0 starting from x0.

    The step is the exact Newton direction from an LU solve of the analytic
    Jacobian; a backtracking line search halves the step until the residual
    max-norm decreases or the damping floor is hit.
    """
    cfg = cfg or NewtonConfig()
    x = np.array(x0, dtype=float)
    r = np.asarray(F(x), dtype=float)
    if r.shape != x.shape:
        raise InvalidInputError(f"residual shape {r.shape} != unknown shape {x.shape}")
    rn = float(np.max(np.abs(r)))
    history = [rn]

    for it in range(cfg.max_iters):
        if rn < cfg.residual_tol:
            return NewtonResult(x=x, residual_norm=rn, iterations=it,
                                residual_history=history)
        J = np.asarray(jac(x), dtype=float)
        if J.shape != (x.size, x.size):
            raise InvalidInputError(f"Jacobian shape {J.shape} is not square of dim {x.size}")
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(f"singular Jacobian at iteration {it}") from exc

        lam = 1.0
        while True:
            x_trial = x + lam * step
            r_trial = np.asarray(F(x_trial), dtype=float)
            rn_trial = float(np.max(np.abs(r_trial)))
            if rn_trial < rn or lam <= cfg.damping_min:
                break
            lam = max(0.5 * lam, cfg.damping_min)
        x, r, rn = x_trial, r_trial, rn_trial
        history.append(rn)

    if rn < cfg.residual_tol:
        return NewtonResult(x=x, residual_norm=rn, iterations=cfg.max_iters,
                            residual_history=history)
    raise NoConvergenceError(
        f"Newton did not reach {cfg.residual_tol:g} in {cfg.max_iters} iterations "
        f"(best residual {rn:g})",
        x_best=x, residual_norm=rn, history=history)
