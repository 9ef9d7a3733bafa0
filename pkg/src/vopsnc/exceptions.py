class DomainError(ValueError):
    """An argument lies outside the physical domain of the operation."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (degenerate conditioning, no convergence, ...)."""
