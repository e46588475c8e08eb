"""Shared exception types."""


class ConsistencyError(RuntimeError):
    """An internal cross-check failed (e.g. a division that must be exact
    left a remainder, or two routes to the same quantity disagree)."""


class BudgetExceeded(ValueError):
    """A brute-force computation was refused because its work measure
    exceeds the configured budget."""
