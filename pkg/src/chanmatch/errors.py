"""Exception hierarchy shared by all modules."""


class ChanMatchError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ChanMatchError, ValueError):
    """An input violates a structural invariant (shape, sign, normalization)."""


class DomainError(ChanMatchError, ValueError):
    """A value lies outside the domain of a logarithm or ratio."""


class DegenerateTruthError(DomainError):
    """A truth function has zero logical probability."""


class SupportError(ChanMatchError, ValueError):
    """A distribution puts no mass on the grid."""


class DegenerateSampleError(ChanMatchError, ValueError):
    """An empirical distribution has zero variance along some axis."""


class ConfigurationError(ChanMatchError, ValueError):
    """The classifier cannot proceed with the given configuration."""


class UnsupportedDimensionError(ChanMatchError, ValueError):
    """An operation was asked to handle a grid of the wrong dimensionality."""


class MultiBoundaryError(ChanMatchError, ValueError):
    """A 1D partition does not have exactly one label change.

    ``crossings`` lists the coordinates of the first cell after every change.
    """

    def __init__(self, crossings):
        self.crossings = list(crossings)
        super().__init__(
            f"expected exactly one label boundary, found {len(self.crossings)}"
            f" at {self.crossings}"
        )
