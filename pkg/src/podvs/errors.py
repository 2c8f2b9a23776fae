"""Exception types shared across the engine."""


class PodvsError(Exception):
    """Base class for all engine errors."""


class ConfigError(PodvsError):
    """Invalid configuration file or parameter."""


class DimensionError(PodvsError):
    """Mismatched or degenerate grid dimensions."""


class FormatError(PodvsError):
    """Malformed or unsupported file content."""


class MetricError(PodvsError):
    """Metric undefined for the given inputs."""
