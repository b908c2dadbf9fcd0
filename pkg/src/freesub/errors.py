"""Typed exceptions shared across the package."""


class FreesubError(Exception):
    """Base class for all package-specific errors."""


class SingularMatrix(FreesubError):
    """A true inverse was required but the matrix is numerically singular."""


class DomainError(FreesubError):
    """An argument lies outside the analytic domain of a transform."""


class ZeroTransform(FreesubError):
    """A Cauchy transform evaluated to ~0 where that is impossible.

    Signals corrupted upstream data (a transform of a genuine probability
    measure cannot vanish on its domain).
    """


class NonPositiveDensity(FreesubError):
    """Density recovery produced significantly negative values.

    Usually means a wrong square-root branch or an invalid transform was
    fed to the inversion.
    """


class UnknownFamily(FreesubError):
    """Requested measure family name is not recognized."""


class BadParams(FreesubError):
    """Parameters violate a constructor's contract (e.g. variance <= 0)."""


class NoConvergence(FreesubError):
    """An iterative solver exhausted its budget.

    Attributes
    ----------
    iterations : int
        Iterations performed.
    residual : float
        Last observed residual.
    point : object
        The evaluation point that failed (z, b, target, ...), if known.
    """

    def __init__(self, message, iterations=None, residual=None, point=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
        self.point = point


class DegenerateTransform(FreesubError):
    """The circle transform is constant on the disk (Haar-type measure).

    Any point solves the subordination equation, so no value is
    identifiable; callers must use the Haar-specific check instead.
    """


class JacobianSingular(FreesubError):
    """Newton's Jacobian is numerically singular; the map is locally
    non-invertible at the current iterate."""


class DimensionMismatch(FreesubError):
    """Array dimensions do not factor or agree as required."""
