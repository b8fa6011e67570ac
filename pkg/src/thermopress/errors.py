"""Exception hierarchy shared by every module."""


class ThermoError(Exception):
    """Base class for library errors."""


class DomainError(ThermoError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class SymbolRangeError(DomainError):
    """A symbol is not in ``range(alphabet_size)``."""


class ContractError(ThermoError, ValueError):
    """A documented precondition of an operation was violated."""


class UnsupportedHypothesisError(ThermoError):
    """A theorem hypothesis (mixing, nonconstant potential, ...) fails."""


class ReducibleError(DomainError):
    """Transition matrix is reducible; ``components`` lists the classes."""

    def __init__(self, components):
        self.components = [list(c) for c in components]
        super().__init__(
            "reducible transition matrix, strongly connected components: %s" % self.components
        )


class BudgetError(ThermoError):
    """Requested computation exceeds its enumeration budget."""


class ConvergenceError(ThermoError):
    """Iterative solver stopped without meeting its tolerance."""

    def __init__(self, message, best=None, grad_norm=None):
        self.best = best
        self.grad_norm = grad_norm
        super().__init__(message)
