"""Exception hierarchy shared by every imagedim component."""

from typing import Optional


class ImageDimError(Exception):
    """Base class for all errors raised by imagedim."""


class InvalidParameterError(ImageDimError, ValueError):
    """A parameter is outside the range an operation accepts."""


class BaseMismatchError(InvalidParameterError):
    """A cube address uses a different base than the measure it is evaluated on."""


class ResolutionError(ImageDimError):
    """A requested scale is finer than the data can resolve."""


class NotPositiveDefiniteError(ImageDimError):
    """A covariance matrix stayed indefinite after the declared jitter."""


class EmbeddingError(ImageDimError):
    """Circulant embedding produced negative eigenvalues even after doubling."""


class UnsupportedModelError(ImageDimError):
    """The operation is not defined for this model variant."""


class UnsupportedRegimeError(ImageDimError):
    """Field indices fall outside the regime the dimension law covers."""


class EnumerationGuardError(ImageDimError):
    """An exhaustive enumeration would exceed its hard size limit."""


class DepthSaturationError(ImageDimError):
    """Two points agree through the full representation depth."""

    def __init__(self, message: str, pair: Optional[tuple] = None):
        super().__init__(message)
        self.pair = pair


class DuplicateWordError(InvalidParameterError):
    """Join sets need distinct words at the working depth."""


class TranslateNotFoundError(ImageDimError):
    """No translate satisfied the pairwise bounds; this contradicts the selection guarantee."""


class ConfigError(ImageDimError):
    """A configuration file is missing or does not match its schema."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path


class CountBoundError(ImageDimError):
    """A level-configuration count exceeded its closed bound 2^n n!."""
