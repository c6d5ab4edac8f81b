"""Exception types shared across the package."""


class CleanGraphError(Exception):
    pass


class InvalidInput(CleanGraphError, ValueError):
    """Unparseable or out-of-range input (bad modulus, non-prime base, ...)."""


class DomainError(CleanGraphError, ValueError):
    """Operation undefined for the given operands (inverse of a non-unit, a == b, ...)."""


class Unsupported(CleanGraphError, ValueError):
    """Formula requested outside the range where it is defined (e.g. one local factor)."""


class BudgetExceeded(CleanGraphError, RuntimeError):
    def __init__(self, what: str, size: int, budget: int):
        super().__init__(f"{what}: N={size} exceeds budget {budget}")
        self.size = size
        self.budget = budget


class FormulaViolation(CleanGraphError, ArithmeticError):
    """A closed form produced an odd numerator where an exact halving is required."""
