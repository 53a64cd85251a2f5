"""Exception types shared across the pipeline."""


class PolarscoreError(Exception):
    """Base class for all pipeline errors."""


class InputError(PolarscoreError):
    """Unusable input data or a violated operation precondition."""


class ConfigError(PolarscoreError):
    """Invalid pipeline configuration, detected before any work starts."""


class UnpolarizedEventError(PolarscoreError):
    """Cluster labeling found both parties' majority in a single cluster."""
