"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A numerical routine failed (no steady state, unstable integration, ...).

    Extra context may be attached as attributes, e.g. ``kernel_dim`` when a
    degenerate Liouvillian kernel is detected.
    """


class ConfigError(ValueError):
    """Invalid run configuration (CLI flags, config file, presets)."""
