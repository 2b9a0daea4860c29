"""Exception hierarchy for fibra.

Every error carries a stable ``code`` (the class name) and a ``witness`` dict
naming the offending symbols, indices, charts, points or elements, so that
reports can show exactly what failed.
"""

from typing import Any, Dict, Optional


class FibraError(Exception):
    """Base class for all library errors."""

    usage = False

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        """Initialize the error.

        Args:
            message: Human readable description
            witness: Structured data naming what failed
        """
        super().__init__(message)
        self.message = message
        self.witness: Dict[str, Any] = dict(witness or {})

    @property
    def code(self) -> str:
        """Stable error name used in reports."""
        return type(self).__name__

    def to_dict(self) -> Dict[str, Any]:
        """Serialize for machine-readable reports."""
        return {"code": self.code, "message": self.message, "witness": self.witness}


class UsageError(FibraError):
    """Errors caused by the input document or flags rather than by a verdict."""

    usage = True


# algebra


class MissingTable(FibraError):
    pass


class OutOfRangeEntry(FibraError):
    pass


class ArityMismatch(FibraError):
    pass


class UnknownSymbol(FibraError):
    pass


class ElementOutOfRange(FibraError):
    pass


class SignatureMismatch(FibraError):
    pass


class EmptyList(FibraError):
    pass


class NotAGroup(FibraError):
    pass


class NotClosed(FibraError):
    pass


class CapExceeded(UsageError):
    """An enumeration would exceed its configured cap."""


# bundle


class NotACover(FibraError):
    pass


class MissingTransition(FibraError):
    pass


class SpuriousTransition(FibraError):
    pass


class NotABijection(FibraError):
    pass


class IdentityLawViolated(FibraError):
    pass


class InverseLawViolated(FibraError):
    pass


class CocycleViolated(FibraError):
    pass


class PointNotInChart(FibraError):
    pass


class BaseMismatch(FibraError):
    pass


class BaseMapNotBijective(FibraError):
    pass


class BundleMismatch(FibraError):
    pass


# fibered algebra


class TransitionNotHomomorphism(FibraError):
    pass


class SizeMismatch(FibraError):
    pass


class NotAHomomorphism(FibraError):
    pass


# holonomy


class NotALoop(FibraError):
    pass


class NonOverlappingStep(FibraError):
    pass


class NerveDisconnected(FibraError):
    pass


# representation


class UnitLawViolated(FibraError):
    pass


class CompositionLawViolated(FibraError):
    pass


class NotBijective(FibraError):
    pass


class EquivarianceViolated(FibraError):
    pass


class IncompleteAction(FibraError):
    pass


class MismatchDetected(FibraError):
    """Two computations that must agree did not; signals corrupted data."""


class CriterionDisagreement(FibraError):
    """Section-level and fiber-level criteria disagree; signals a bug."""


class NotSingleTransitive(FibraError):
    pass


class NotCovariant(FibraError):
    pass


class GroupMismatch(FibraError):
    pass


# numeric demo


class NonSquare(FibraError):
    pass


class NonFinite(FibraError):
    pass


# spec documents


class SpecSyntaxError(UsageError):
    """The spec file is not valid JSON."""


class UnknownReference(UsageError):
    pass


class SchemaViolation(UsageError):
    pass


class MissingSection(UsageError):
    """The spec lacks a block the command needs."""
