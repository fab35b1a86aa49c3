"""
Exception hierarchy for QPG
"""

from typing import Any, List, Optional


class QPGError(Exception):
    """Base class for every error raised by the library"""


class InvalidDimensionsError(QPGError, ValueError):
    """Matrix shapes do not agree with the declared player dimensions"""


class InvalidInputError(QPGError, ValueError):
    """Input violates a structural requirement (e.g. not Hermitian)"""


class NotPSDError(QPGError, ValueError):
    """Matrix has an eigenvalue below the numerical PSD threshold"""


class DegenerateStateError(QPGError, ArithmeticError):
    """Projection to the density manifold has nothing left to normalize"""


class SingularStateError(QPGError, ArithmeticError):
    """A negative matrix power was requested on a singular state"""


class RequiresPDGameError(QPGError, ValueError):
    """lin-MMWU needs a positive definite game operator"""


class DegenerateUtilityError(QPGError, ArithmeticError):
    """lin-MMWU normalizer vanished"""


class UnsupportedDimensionError(QPGError, ValueError):
    """Operation only defined for a specific player dimension"""


class StabilityGuardError(QPGError, ValueError):
    """Step size too large for the game's spectral scale"""


class OracleInconsistencyError(QPGError, RuntimeError):
    """Dynamics beat the oracle, so one of them is broken"""


class RunAborted(QPGError):
    """A step failed mid-run; carries the trajectory recorded so far"""

    def __init__(self, cause: Exception, trajectory: Optional[List[Any]] = None):
        super().__init__(f"run aborted at step {len(trajectory or [])}: {cause}")
        self.cause = cause
        self.trajectory = list(trajectory or [])
