"""Exception types shared across the package."""


class BreatherLabError(Exception):
    """Base class for all errors raised by breather_lab."""


class InvalidInputError(BreatherLabError):
    """Dimension mismatch or invalid parameter value."""


class SingularStateError(BreatherLabError):
    """Energy-phase coordinates are undefined (zero-amplitude site)."""


class IntegrationFailureError(BreatherLabError):
    """Step-size underflow; carries the last good point and partial trace."""

    def __init__(self, message, t_last, y_last, times=None, states=None):
        super().__init__(message)
        self.t_last = t_last
        self.y_last = y_last
        self.times = times
        self.states = states


class NoConvergenceError(BreatherLabError):
    """Newton ran out of iterations; carries the best iterate seen."""

    def __init__(self, message, x_best, residual_norm, history):
        super().__init__(message)
        self.x_best = x_best
        self.residual_norm = residual_norm
        self.history = history


class SingularJacobianError(BreatherLabError):
    """LU factorization of the Newton Jacobian failed."""


class EigensolverFailureError(BreatherLabError):
    """QR iteration did not converge within the sweep budget."""


class DomainError(BreatherLabError):
    """Argument outside the mathematical domain of a special function."""


class SpectrumAnomalyError(BreatherLabError):
    """Spectrum does not match the expected pattern; carries the eigenvalues."""

    def __init__(self, message, eigenvalues):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class BasisDegenerateError(BreatherLabError):
    """Decomposition basis is numerically singular."""


class ContinuationStalledError(BreatherLabError):
    """Continuation step underflowed; carries the partial family.

    The stall point is a candidate bifurcation, not an error in itself.
    """

    def __init__(self, message, family):
        super().__init__(message)
        self.family = family


class NoFixedPointError(BreatherLabError):
    """Requested two-site fixed point does not exist for these parameters."""


class ApproximationBreakdownError(BreatherLabError):
    """Closed-form approximation evaluated outside its validity window."""


class PastValidityError(BreatherLabError):
    """Time argument beyond the horizon where the closed form expires."""


class ConfigError(BreatherLabError):
    """CLI configuration invalid; carries every problem found in one pass."""

    def __init__(self, problems):
        super().__init__("; ".join(problems))
        self.problems = list(problems)
