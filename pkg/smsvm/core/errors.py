from typing import Any


class SmsvmError(Exception):
    """Base exception class for solver, data and CLI errors"""

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.context = dict(context)

    def __str__(self) -> str:
        base = super().__str__()
        if not self.context:
            return base
        details = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{base} ({details})"


class DatasetError(SmsvmError):
    """Raised when a dataset violates its invariants"""
    pass


class ParseError(DatasetError):
    """Raised when a libSVM file cannot be parsed"""

    def __init__(self, message: str, line: int, **context: Any):
        super().__init__(f"line {line}: {message}", line=line, **context)
        self.line = line


class DimensionMismatchError(SmsvmError):
    """Raised when vector, matrix or model dimensions disagree"""
    pass


class LineSearchError(SmsvmError):
    """Base class for failures of the exact l1 line search"""
    pass


class InvalidLineSearchProblem(LineSearchError):
    """Raised when the line-search preconditions do not hold"""
    pass


class UnboundedLineSearchError(LineSearchError):
    """Raised when j(s) decreases without bound"""
    pass


class SolverError(SmsvmError):
    """Base class for failures inside the Newton solver"""
    pass


class NumericalFailure(SolverError):
    """Raised on non-finite objective, gradient or direction"""
    pass


class ArmijoStallError(SolverError):
    """Raised when the Armijo safeguard exhausts its halvings"""
    pass


class LinearSolveError(SolverError):
    """Raised when the active-block Newton system cannot be factored"""
    pass


class BaselineError(SmsvmError):
    """Base class for baseline optimizer failures"""
    pass


class DivergenceError(BaselineError):
    """Raised when a baseline produces non-finite iterates"""
    pass
