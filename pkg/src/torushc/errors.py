"""Exceptions shared across the package.

The CLI maps PreconditionError to exit code 2 and BudgetExceededError
to exit code 3.
"""


class PreconditionError(ValueError):
    """An operation was called with inputs violating its contract."""


class BudgetExceededError(RuntimeError):
    """A computation would exceed its configured size/step budget."""
