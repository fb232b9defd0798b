"""Generic numerical kernels: ODE integration, Newton, eigensolver, Lambert W."""

from .eigen import EigenDecomposition, eig_dense
from .integrate import IntegrationResult, IntegratorConfig, integrate, is_compiled_rhs
from .lambertw import lambert_w_minus1
from .newton import NewtonConfig, NewtonResult, newton_solve

__all__ = [
    "EigenDecomposition",
    "eig_dense",
    "IntegrationResult",
    "IntegratorConfig",
    "integrate",
    "is_compiled_rhs",
    "lambert_w_minus1",
    "NewtonConfig",
    "NewtonResult",
    "newton_solve",
]
