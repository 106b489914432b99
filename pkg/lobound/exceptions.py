from typing import Any, Optional


class LoboundError(Exception):
    pass


class InputError(LoboundError, ValueError):
    """
    Raised when an argument is outside the domain of an operation
    (dimension mismatch, unnormalized auxiliary state, malformed gate selector, ...)
    """

    # NOTE: derives from ValueError so that callers treating bad arguments
    # generically keep working.


class ConvergenceError(LoboundError):
    """
    Raised when an iterative kernel exhausts its iteration budget
    """

    def __init__(self, message: str, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")


class StructuralError(LoboundError):
    """
    Raised when a dual solution does not have the required block structure
    """


class InfeasibleError(LoboundError):
    """
    Raised when a point handed to an operation violates its constraints.
    The feasibility report is available as :attr:`report`.
    """

    def __init__(self, message: str, report: Optional[Any] = None):
        self.report = report
        super().__init__(message)


class UnverifiedCertificateError(LoboundError):
    """
    Raised when a bound is requested from a certificate that did not pass verification
    """

    def __init__(self, message: str, report: Optional[Any] = None):
        self.report = report
        super().__init__(message)


class SolverError(LoboundError):
    """
    Raised when the linear programming backend fails
    """


class SerializationError(LoboundError):
    pass
