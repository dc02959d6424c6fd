"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid scenario, parameter override or run configuration."""


class UndefinedStatisticError(ValueError):
    """A statistic was requested on data that cannot support it (no power, no samples)."""


class NoPointingError(ValueError):
    """Beam pointing was requested on a channel in outage."""
