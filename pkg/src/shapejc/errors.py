"""Exception hierarchy.

Everything raised on purpose by the package derives from ``ShapeJCError``
so callers (and the CLI) can separate contract violations from bugs.
"""


class ShapeJCError(Exception):
    """Base class for all package errors."""


class InvalidFamily(ShapeJCError, ValueError):
    """Family parameters violate the family's invariants."""


class UnsupportedFamily(ShapeJCError, TypeError):
    """Operation not available for this family (e.g. grid work on a scaling chain)."""


class LevelOutOfRange(ShapeJCError, ValueError):
    """Requested level lies beyond the bound spectrum."""


class NegativeDriveStrength(ShapeJCError, ValueError):
    """Drive strength Omega must be nonnegative."""


class GridTooCoarse(ShapeJCError, ValueError):
    pass


class MatchFailure(ShapeJCError, ValueError):
    """Analytic and numerical level sets cannot be paired."""


class DimensionMismatch(ShapeJCError, ValueError):
    pass


class EigensolverFailure(ShapeJCError, ArithmeticError):
    """Numerical failure inside an eigensolver."""


class ConvergenceFailure(EigensolverFailure):
    """Iteration cap exceeded while isolating eigenvalue ``index``."""

    def __init__(self, index, iterations):
        super().__init__(f"no convergence for eigenvalue {index} after {iterations} iterations")
        self.index = index
        self.iterations = iterations
