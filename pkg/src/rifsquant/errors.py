"""Exception types raised across the package."""


class RifsError(Exception):
    """Base class for all package errors."""


class SpecError(RifsError, ValueError):
    """A system description violates one of its invariants."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvalidSymbol(RifsError, IndexError):
    pass


class BudgetExceeded(RifsError):
    """An enumeration would produce more nodes than the configured budget."""

    def __init__(self, count, budget):
        super().__init__(f"enumeration needs {count} nodes, budget is {budget}")
        self.count = count
        self.budget = budget


class SeparationRequired(RifsError, ValueError):
    pass


class NotAnFma(RifsError, ValueError):
    pass


class Unsupported(RifsError, NotImplementedError):
    pass


class DegenerateInput(RifsError, ValueError):
    pass


class InternalInvariant(RifsError, RuntimeError):
    pass
