"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class PoleError(DomainError):
    """Evaluation was requested exactly at a pole of a meromorphic function."""


class IterationLimitError(RuntimeError):
    """A single simulated walk exceeded the configured step cap."""


class EmptyInputError(ValueError):
    """An aggregate operation received an empty collection."""
