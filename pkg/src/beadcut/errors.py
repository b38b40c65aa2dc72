"""Exception types shared across the package."""


class BeadcutError(Exception):
    """Base class for every error raised by beadcut."""


class PreconditionError(BeadcutError, ValueError):
    """An input violates a documented precondition."""


class ShapeError(PreconditionError):
    """Dimensions of an allocation do not match the instance."""


class BudgetExceeded(PreconditionError):
    def __init__(self, required, budget):
        super().__init__(
            f"search space of {required} allocations exceeds budget {budget}"
        )
        self.required = required
        self.budget = budget


class InstanceParseError(PreconditionError):
    def __init__(self, message, location=None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location


class InternalInvariantError(BeadcutError, RuntimeError):
    """A solver reached a state its construction rules out.

    ``state`` holds a JSON-serializable snapshot for debugging, if one was
    available at the point of failure.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state
