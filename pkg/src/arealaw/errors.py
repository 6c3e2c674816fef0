class GraphError(ValueError):
    """Invalid graph specification, disconnected edge list, or size cap exceeded."""


class NotPositiveDefinite(ArithmeticError):
    """A matrix that must be positive definite has a (numerically) non-positive eigenvalue."""

    def __init__(self, min_eig, threshold=None, what="matrix"):
        self.min_eig = float(min_eig)
        self.threshold = threshold
        msg = f"{what} is not positive definite: min eigenvalue {self.min_eig:.6g}"
        if threshold is not None:
            msg += f" <= threshold {threshold:.6g}"
        super().__init__(msg)


class AssumptionViolation(ValueError):
    """Operator norms exceed the configured uniform bound."""


class NumericalConsistencyError(ArithmeticError):
    """A computed quantity contradicts a structural property of states (e.g. nu < 1)."""
