"""Exception hierarchy shared by the solver modules."""


class RoutesubError(Exception):
    pass


class DomainError(RoutesubError, ValueError):
    """A set or item lies outside the domain of an oracle."""


class ParameterError(RoutesubError, ValueError):
    pass


class PreconditionError(RoutesubError, ValueError):
    pass


class IllConditionedCovariance(RoutesubError, ArithmeticError):
    def __init__(self, items, pivot):
        self.items = tuple(items)
        self.pivot = pivot
        super().__init__(
            f"covariance submatrix on items {list(self.items)} is not positive "
            f"definite (pivot {pivot:.3e})"
        )


class SizeError(RoutesubError, ValueError):
    """Exact/brute-force routine asked to run beyond its size limit."""


class InfeasibleError(RoutesubError):
    """No route exists (disconnected graph)."""
