"""Exception types shared across the package.

ValueError subclasses mark rejected inputs (CLI exit 2); InfeasibleError
subclasses mark runs whose budgets or preconditions cannot be met (CLI exit 3).
"""


class ConfigError(ValueError):
    """Malformed configuration file or flag value."""


class InfeasibleError(RuntimeError):
    """The requested computation exceeds a configured budget or precondition."""


class BudgetExceededError(InfeasibleError):
    """Eigenpair or memory budget exceeded; shrink lambda or raise the budget."""


class SpectrumIncompleteError(InfeasibleError):
    """Boundary spectrum cutoff is below the mode-skip threshold of the request."""


class EmptySpectrumError(InfeasibleError):
    """No model eigenvalues below the requested lambda."""


class ConvergenceError(InfeasibleError):
    """Inverse iteration failed; usually a degenerate cluster wider than tolerance."""
