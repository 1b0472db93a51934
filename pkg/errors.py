"""
Error hierarchy for the field lab.

Every error carries a stable ``code`` used in logs, JSON reports and tests.
"""

from typing import Any, Optional


class FieldLabError(Exception):
    """Base class for all lab errors"""

    code = "field-lab-error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self), **self.details}


class DomainError(FieldLabError, ValueError):
    """Argument outside the domain of an operation"""

    code = "domain-error"


class SingularShellError(DomainError):
    """Lower-sign radial evaluation inside the field-free shell r <= sqrt(|c1|)"""

    code = "singular-shell"

    def __init__(self, r: float, shell_radius: float):
        super().__init__(
            f"r={r!r} lies inside the singular shell r <= {shell_radius!r}",
            r=r,
            shell_radius=shell_radius,
        )


class QuadratureFailure(FieldLabError):
    """Quadrature did not reach the requested error bound"""

    code = "quadrature-failure"


class IndefiniteMetricError(FieldLabError):
    """Negative radicand under a square-root Lagrangian"""

    code = "indefinite-metric"

    def __init__(self, message: str, location: Optional[Any] = None, radicand: Optional[float] = None):
        super().__init__(message, location=location, radicand=radicand)
        self.location = location
        self.radicand = radicand


class CFLViolationError(DomainError):
    code = "cfl-violation"


class BlowupError(FieldLabError):
    code = "blowup"


class NullOrSpacelikeError(DomainError):
    """Generalized momenta requested for a vector with non-positive fourth-power length"""

    code = "null-or-spacelike"


class NoConvergenceError(FieldLabError):
    code = "no-convergence"


class DomainViolationError(FieldLabError):
    """Newton iterate left the domain of the Lagrangian density"""

    code = "domain-violation"
