"""Exception types raised by the evaluation and verification code"""
from typing import Any, Optional


class DirichletError(Exception):
    """Base class for every error raised by this package"""


class DomainError(DirichletError, ValueError):
    """An argument lies outside the domain where an operation is defined"""

    def __init__(self, message: str, parameter: Optional[str] = None):
        super().__init__(message)
        self.parameter = parameter


class SeriesDivergenceError(DomainError):
    """The absolute-convergence self-check failed"""


class TruncationCapError(DirichletError, RuntimeError):
    """Adaptive truncation reached the configured cap before stabilising"""

    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial


class NonConvergenceError(DirichletError, RuntimeError):
    """Newton iteration did not reach the requested residual"""

    def __init__(self, message: str, last_iterate: complex, residual: float):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class BoundViolationError(DirichletError, RuntimeError):
    """A value that must satisfy |f| < gamma does not"""
