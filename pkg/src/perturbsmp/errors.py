"""Exception hierarchy shared across the package."""
from __future__ import annotations


class PerturbSMPError(Exception):
    """Base class for every error raised by this package."""


class ExpansionError(PerturbSMPError, ValueError):
    pass


class InvalidBound(ExpansionError):
    pass


class EmptyCoefficients(ExpansionError):
    pass


class PivotalZeroLead(ExpansionError):
    pass


class InconsistentRepresentations(ExpansionError):
    pass


class NotPivotal(ExpansionError):
    pass


class EmptySequence(ExpansionError):
    pass


class DeltaTooLarge(ExpansionError):
    pass


class NonpositiveEpsilon(ExpansionError):
    pass


class ModelError(PerturbSMPError, ValueError):
    pass


class ParseError(ModelError):
    """Malformed model or expansion record; ``location`` says where."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class EmptySubset(ModelError):
    pass


class SingleState(ModelError):
    pass


class BadPermutation(ModelError):
    pass


class SameState(ModelError):
    pass


class InvalidModel(ModelError):
    """Raised when an operation needs a model that passes validation."""

    def __init__(self, report):
        self.report = report
        super().__init__("model failed validation: " + "; ".join(
            f"[{v.condition}] {v.location}: {v.message}" for v in report.violations))


class InvariantViolation(PerturbSMPError):
    """Structural stationary identities failed; carries the full report."""

    def __init__(self, report):
        self.report = report
        super().__init__("stationary invariants violated: " + "; ".join(report.violations))


class EpsilonOutOfRange(PerturbSMPError, ValueError):
    pass


class SingularSystem(PerturbSMPError, ArithmeticError):
    pass
