"""Exception hierarchy; each class maps to one CLI exit status."""


class NilgrowthError(Exception):
    exit_code = 1


class UsageError(NilgrowthError, ValueError):
    """Bad input: shape mismatch, failed precondition, malformed spec."""

    exit_code = 2


class ResourceError(NilgrowthError):
    """An enumeration or search budget was exhausted."""

    exit_code = 3

    def __init__(self, message, budget=None):
        super().__init__(message)
        self.budget = budget


class BoundViolation(NilgrowthError):
    """A bound that must hold mathematically was observed to fail."""

    exit_code = 4

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class ConstantTableError(BoundViolation):
    """A harmonious construction failed because a constant was too small."""
