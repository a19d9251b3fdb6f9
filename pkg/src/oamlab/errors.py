"""Exception types shared across the numerical modules."""


class ConvergenceError(RuntimeError):
    """A numerical routine failed to reach its requested tolerance."""


class SeriesConvergenceError(ConvergenceError):
    """Hypergeometric series hit its term cap before converging."""

    def __init__(self, message, z=None, residual=None, n_terms=None):
        super().__init__(message)
        self.z = z
        self.residual = residual
        self.n_terms = n_terms


class QuadratureConvergenceError(ConvergenceError):
    """Adaptive quadrature exhausted its refinement budget.

    Carries the achieved error estimate and the (alpha, l0, t) point so a
    sweep driver can name the failing grid point.
    """

    def __init__(self, message, achieved_err=None, alpha=None, l0=None, t=None):
        super().__init__(message)
        self.achieved_err = achieved_err
        self.alpha = alpha
        self.l0 = l0
        self.t = t


class ResolutionError(ValueError):
    """Sampling grid too coarse for the requested mode or oscillation."""


class GeometryError(ValueError):
    """Phase-screen geometry cannot support the requested statistics."""
