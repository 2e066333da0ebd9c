"""Exception types shared across the package."""


class JrrError(Exception):
    """Base class for all package errors."""


class ParameterError(JrrError, ValueError):
    """An argument violates a precondition."""


class InfeasibleCorrelationError(ParameterError):
    """The requested correlation makes some joint probability negative."""


class SamplerInfeasibleError(ParameterError):
    """The sampler instantiation is undefined for the requested parameters."""


class EnumerationSizeError(JrrError, ValueError):
    """A brute-force enumeration would exceed its size cap."""


class DatasetFormatError(JrrError, ValueError):
    """A dataset file failed to parse."""


class MetricUndefinedError(JrrError, ValueError):
    """A metric has an empty or degenerate domain."""
