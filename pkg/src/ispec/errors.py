"""Exception types shared across the package."""


class IspecError(Exception):
    """Base class so callers can catch everything from this package at once."""


class MalformedDocument(IspecError):
    """Model document is not valid JSON or is missing required keys."""


class DimensionMismatch(IspecError):
    """Coupling arrays do not match the declared period."""


class NonPositiveCoupling(IspecError):
    """A coupling is zero or negative; only ferromagnets are supported."""


class WeightOutOfRange(IspecError):
    """An edge weight left the open interval (0, 1)."""


class NonOrientable(IspecError):
    """No clockwise-odd orientation exists; signals an embedding bug."""


class BijectionFailure(IspecError):
    """Spin pattern has no matching dimer cover (odd terminal parity)."""


class NotSkew(IspecError):
    """Matrix is not antisymmetric within tolerance."""


class OddDimension(IspecError):
    """Pfaffian of an odd-dimensional matrix requested."""


class NearSingular(IspecError):
    """Linear solve rejected: matrix is singular to working precision."""


class NoSignChange(IspecError):
    """Bisection bracket never found a sign change."""


class NodeNotFound(IspecError):
    """Spectral curve has no node at the expected corner."""


class DualityViolation(IspecError):
    """Dual weight systems disagree where they must agree."""


class NonPositiveResidual(IspecError):
    """Decay fit fed a correlation at or below its limiting value."""


class TooLarge(IspecError):
    """Instance exceeds the hard cap of an exhaustive oracle."""
