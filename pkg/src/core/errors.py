from typing import Any, Dict, Optional


class EncloseError(Exception):
    """Base class for every failure raised by the enclosure library"""

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def __str__(self) -> str:
        if not self.details:
            return self.message
        extras = ", ".join(f"{k}={v}" for k, v in self.details.items() if k != "partial")
        return f"{self.message} ({extras})" if extras else self.message


# ival
class DomainError(EncloseError):
    """Operation undefined on the operand interval (0 in divisor, sqrt of negatives)"""


class VerificationFailed(EncloseError):
    """Approximate diagonalization too poor to certify"""


class NotPositiveDefinite(EncloseError):
    """Matrix could not be verified positive definite"""


class NoSignChange(EncloseError):
    """Bracket endpoints do not carry verified opposite signs"""


class StalledBeforeTol(EncloseError):
    """Bisection could not decide a sign before reaching the width target"""

    def __init__(self, message: str, bracket=None, **details: Any):
        super().__init__(message, **details)
        self.bracket = bracket


# slenclose
class NotDisjoint(EncloseError):
    """Crude enclosures overlap below the requested ceiling"""


class NonPositiveA(EncloseError):
    """Leading coefficient a(x) not verifiably positive"""


class DepthExceeded(EncloseError):
    """Partition needs more levels than configured"""


class BasisDegenerate(EncloseError):
    """Gram matrix of the test space could not be verified positive definite"""


class GapViolated(EncloseError):
    """Spectral gap point rho does not lie above the Rayleigh quotient"""


class Halted(EncloseError):
    """Enclosure procedure stopped; partial results stay rigorous"""

    def __init__(self, message: str, partial: Optional[Any] = None, **details: Any):
        super().__init__(message, **details)
        self.partial = partial


# graphenclose
class ClassViolation(EncloseError):
    """Partition part failed its class C_a certificate"""


class IncompleteFamily(EncloseError):
    """Path family misses an ordered vertex pair"""


class DisconnectedPath(EncloseError):
    """Path steps across a non-edge or has wrong endpoints"""


class NotMonotone(EncloseError):
    """Staircase profile is not non-decreasing"""


# forms
class DependentConstraints(EncloseError):
    """Constraint vectors could not be verified linearly independent"""


# cli
class ConfigError(EncloseError):
    """Problem configuration failed to parse or validate"""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None, **details: Any):
        super().__init__(message, line=line, field=field, **details)
        self.line = line
        self.field = field
