class DomainError(ValueError):
    """Input outside the domain of an operation (CLI exit code 2)."""


class NumericError(ArithmeticError):
    """Numerical procedure failed to converge or lost mass (CLI exit code 3)."""
