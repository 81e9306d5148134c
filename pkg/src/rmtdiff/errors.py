"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Matrix or block dimensions are inconsistent."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class SingularityError(ArithmeticError):
    """An evaluation hit an exact singularity (zero denominator determinant)."""
