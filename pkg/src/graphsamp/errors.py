"""Exception types shared across the package."""


class GraphSampError(Exception):
    """Base class for every error raised by graphsamp."""


class ParameterError(GraphSampError, ValueError):
    """An argument lies outside its documented domain."""


class DegenerateGraphError(GraphSampError):
    """The graph cannot support the requested operation (e.g. it has no edges)."""


class DegenerateScoresError(GraphSampError):
    """A score vector came out all-zero and cannot be normalized."""


class SymmetryError(GraphSampError):
    """A matrix that must be symmetric is not."""


class NumericError(GraphSampError):
    """A numerical routine failed to converge or produced invalid output."""


class ConsistencyError(GraphSampError):
    """Inputs that must agree with each other do not."""


class InfiniteVarianceError(GraphSampError):
    """A risk formula diverges: a node that contributes has zero sampling probability."""


class ConfigError(GraphSampError):
    """An experiment configuration is invalid.

    `field` holds the dotted path of the offending entry, e.g. ``sweep.m_grid``.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
