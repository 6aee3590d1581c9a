"""Exception types shared across the package."""


class UplikeError(Exception):
    """Base class for all errors raised by uplike."""


class DimensionMismatch(UplikeError, ValueError):
    pass


class DyadicOverflowError(UplikeError, ArithmeticError):
    """Raised when a dyadic exponent grows past the configured cap."""


class NotDivisible(UplikeError, ArithmeticError):
    """The divisor does not divide the dividend exactly (over dyadic coefficients)."""


class NotContractiveWithin(UplikeError):
    """No iterate up to ``max_L`` of the difference scheme has norm below one."""

    def __init__(self, max_L, norms=None):
        self.max_L = max_L
        self.norms = list(norms or [])
        super().__init__(f"difference scheme not contractive within L <= {max_L}")


class MissingFullFactor(UplikeError, ValueError):
    """A factored symbol without a full smoothing factor was given where one is needed."""


class CapExceeded(UplikeError, MemoryError):
    """A lattice window would exceed the configured point cap."""


class AssumptionSViolation(UplikeError, ValueError):
    """A mask sequence violates the support growth assumption (scaling, monotone, summable)."""


class SpecError(UplikeError, ValueError):
    """Malformed scheme configuration file."""
