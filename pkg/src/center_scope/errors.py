"""Exception types shared across the package."""


class InvariantViolation(RuntimeError):
    """An internal consistency check failed; indicates a bug or corrupt input."""


class InconsistentData(ValueError):
    """Input data is well formed but mathematically inconsistent."""
