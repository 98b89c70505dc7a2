"""Exception types shared by the library and the experiment CLI."""


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


class NumericalInvariantError(RuntimeError):
    """A numerical sanity bound was violated mid-computation (CLI exit code 3)."""


class FitRegionError(RuntimeError):
    """No fitting window satisfies the window policy; reported, never guessed."""


class DecayNotResolvableError(RuntimeError):
    """Kernel decay faster than resolvable: fewer than three lags above the noise floor."""
