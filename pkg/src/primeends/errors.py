"""Exception types shared across the package."""


class PrimeEndsError(Exception):
    """Base class for all package errors."""


class UnknownGallery(PrimeEndsError):
    pass


class ResolutionTooCoarse(PrimeEndsError):
    pass


class NotABoundaryPoint(PrimeEndsError):
    pass


class NotInDomain(PrimeEndsError):
    pass


class DomainMismatch(PrimeEndsError):
    pass


class EmptyBall(PrimeEndsError):
    pass


class RadiusLadderEmpty(PrimeEndsError):
    pass


class InaccessibleError(PrimeEndsError):
    """Raised by operations that require an accessible boundary point."""


class NotDisjoint(PrimeEndsError):
    pass


class PlateOverlap(PrimeEndsError):
    pass


class ExponentOutOfRange(PrimeEndsError):
    pass


class ScaleMismatch(PrimeEndsError):
    pass


class CollarEmpty(PrimeEndsError):
    pass


class NotSingleton(PrimeEndsError):
    pass


class NotJohn(PrimeEndsError):
    pass


class RatioViolated(PrimeEndsError):
    pass


class UnresolvedAtDepth(PrimeEndsError):
    """The grid cannot resolve the question at the requested scales."""
