"""Exception types shared across the toolkit."""


class NfkitError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgumentError(NfkitError, ValueError):
    """A parameter is outside its documented domain."""


class SingularGeometryError(NfkitError):
    """Coincident or overlapping geometry (zero propagation distance)."""


class DegenerateChannelError(NfkitError):
    """Channel has no usable energy (all-zero entries)."""


class ConfigurationError(NfkitError):
    """A beamformer structure or partition cannot be realized."""


class EstimationError(NfkitError):
    """An estimator could not produce the requested output; carries a diagnostic."""


class ConfigError(NfkitError):
    """Scenario config file is syntactically or semantically invalid."""
