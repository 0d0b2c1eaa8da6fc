"""Shared exception types."""


class CapacityError(RuntimeError):
    """A configured enumeration or size limit would be exceeded."""


class SolverStatusError(RuntimeError):
    """An optimization problem turned out infeasible or unbounded."""
