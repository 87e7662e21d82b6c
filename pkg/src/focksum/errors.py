"""Exception and warning types shared across the toolkit."""


class FocksumError(Exception):
    """Base class for all toolkit errors."""


class DomainError(FocksumError):
    """A parameter is outside the admissible range (e.g. p <= 1 or r < 1)."""


class NonPositiveMass(FocksumError):
    """A quadrature mass came out non-positive, signalling a degenerate weight."""


class DegenerateWeight(FocksumError):
    """A weight mass needed as a denominator is zero or non-finite."""


class DivergentConstant(FocksumError):
    """A sup-type weight constant keeps growing across window enlargements."""


class ZeroInfimum(FocksumError):
    """The node infimum of a weight over some square is zero."""


class TruncationTooTight(FocksumError):
    """An integrand is not negligible at the truncation boundary."""


class BoundaryAtomWarning(UserWarning):
    """An atom lies (numerically) on a disk boundary and is excluded."""
