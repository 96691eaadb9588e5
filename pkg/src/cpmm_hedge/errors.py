"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class DataError(ValueError):
    """Input data is well-formed but violates a data invariant."""


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EvaluationError(RuntimeError):
    """A payoff evaluator failed (or returned a non-finite value) at `price`."""

    def __init__(self, price: float, cause: BaseException | None = None):
        self.price = price
        detail = f": {cause}" if cause is not None else ": non-finite value"
        super().__init__(f"evaluator failed at price {price!r}{detail}")


class InfeasibleError(RuntimeError):
    """No candidate hedge satisfies the budget inequality.

    ``min_violation`` is the smallest amount by which any admissible strike
    pair overshoots the budget (``lhs - rhs``, quote units); ``None`` when no
    admissible pair exists at all.
    """

    def __init__(self, message: str, min_violation: float | None = None, best_pair=None):
        self.min_violation = min_violation
        self.best_pair = best_pair
        super().__init__(message)
