"""Exception types shared across the simulator."""


class ConfigurationError(ValueError):
    """Invalid configuration value; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class NumericDomainError(ValueError):
    """Input outside the numeric domain of an operation (e.g. non-Hermitian)."""


class DegenerateCombinerError(RuntimeError):
    """Combiner construction hit a (near-)rank-deficient channel matrix."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class MomentInconsistencyError(RuntimeError):
    """Statistical SINR denominator came out nonpositive (too few samples)."""
