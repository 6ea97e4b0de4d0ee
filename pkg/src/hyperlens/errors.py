"""Exception hierarchy.

The CLI maps these onto its exit codes: :class:`ParseError` is a usage
error (1), every :class:`DomainError` is a domain/precondition error (2)
and :class:`ImageFormatError` (an ``OSError``) is an I/O error (3).
"""


class HyperlensError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(HyperlensError, ValueError):
    """A textual spec (scene string, unit suffix, flag list) is malformed."""

    def __init__(self, message, token=None):
        super().__init__(message)
        self.token = token


class DomainError(HyperlensError, ValueError):
    """A precondition on the numerical inputs is violated."""


class DimensionMismatch(DomainError):
    pass


class NonHermitianSpectrum(DomainError):
    """Raised by the inverse DFT when the spectrum cannot come from a real image."""


class SupportTooLarge(DomainError):
    pass


class NotApplicable(DomainError):
    pass


class NotDivisible(DomainError):
    pass


class EpsilonOutOfRange(DomainError):
    pass


class BandOutOfRange(DomainError):
    pass


class NonPositiveInput(DomainError):
    pass


class InvalidParams(DomainError):
    pass


class GridTooLarge(DomainError):
    pass


class ImageFormatError(HyperlensError, OSError):
    """An image file is truncated or not in a supported Netpbm/PFM variant."""
