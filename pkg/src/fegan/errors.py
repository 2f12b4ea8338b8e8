"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An operation received inputs that violate its preconditions."""


class ConfigurationError(RuntimeError):
    """A run-level configuration problem: missing checkpoint, bad config key,
    unavailable optional component, fingerprint mismatch."""
