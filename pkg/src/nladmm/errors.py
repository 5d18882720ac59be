"""Exception types shared across the solver modules."""


class SolverError(Exception):
    """Base class for all solver failures."""


class DimensionMismatch(SolverError):
    """Operands of an operation have inconsistent dimensions."""


class SubproblemFailure(SolverError):
    """An inner subproblem solver returned a non-finite point."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []


class NonFiniteIterate(SolverError):
    """NaN or Inf detected in an iterate; the solve is aborted."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []


class NoCandidate(SolverError):
    """No admissible candidate survived a closed-form update (numerical breakdown)."""


class DegenerateAllZero(SolverError):
    """All cubic coefficients are zero; the root set is undefined."""


class InvalidBracket(SolverError):
    """Bracketed scalar minimization called with lo >= hi."""


class MissingReference(SolverError):
    """A diagnostic needs a known optimum that was not supplied."""


class EmptyTrace(SolverError):
    """A trace-level diagnostic was invoked on an empty trace."""
