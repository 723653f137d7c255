"""Exception hierarchy shared across the package."""


class SdpCommError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(SdpCommError, ValueError):
    """An argument violates the documented contract of an operation."""


class InvalidLabelsError(ParameterError):
    """A label vector has an empty cluster or out-of-range indices."""


class DimensionError(ParameterError):
    """Array shapes are incompatible with the requested operation."""


class SizeLimitError(ParameterError):
    """Input exceeds the hard size cap of an exact enumeration oracle."""


class DegenerateDataError(SdpCommError):
    """The data makes the requested quantity undefined (e.g. zero bandwidth)."""


class DataFormatError(SdpCommError):
    """A data file could not be parsed."""


class ConfigError(SdpCommError):
    """An experiment configuration is invalid."""


class TuningError(SdpCommError):
    """Every solve in a tuning sweep failed; no candidate can be selected."""


class OutOfRegimeError(SdpCommError):
    """Model parameters fall outside the regime where a closed form is defined."""
