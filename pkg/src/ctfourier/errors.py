"""Exception hierarchy shared by the numerical modules and the CLI."""


class HypothesisError(ValueError):
    """Input violates a standing hypothesis (parameter ranges, symbol conditions)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed: step underflow, non-finite values, divergence."""


class CalibrationError(NumericalError):
    """Plancherel calibration is degenerate or not reproducible."""


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""
