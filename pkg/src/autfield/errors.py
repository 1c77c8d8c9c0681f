"""Exception hierarchy.

Every failure carries a short machine-readable ``reason`` (the class name by
default) so the CLI can report it without parsing messages.
"""
from __future__ import annotations


class AutfieldError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def reason(self) -> str:
        return type(self).__name__


# algebra kernel
class PolySyntaxError(AutfieldError, ValueError):
    pass


class MixedVariables(AutfieldError, ValueError):
    pass


class DegreeTooLow(AutfieldError, ValueError):
    pass


class ZeroPolynomial(AutfieldError, ValueError):
    pass


class NotIrreducibleDefiningPoly(AutfieldError, ValueError):
    pass


class Inconclusive(AutfieldError):
    pass


class DegreeCapExceeded(AutfieldError):
    pass


# groups
class NotEpimorphism(AutfieldError, ValueError):
    pass


class TargetMismatch(AutfieldError, ValueError):
    pass


class CompatibilityFailure(AutfieldError):
    pass


class OrderMismatch(AutfieldError, ValueError):
    pass


class NotASubgroup(AutfieldError, ValueError):
    pass


class NotAHomomorphism(AutfieldError, ValueError):
    pass


# fields
class InclusionNotProvided(AutfieldError):
    pass


class NotEmbedded(AutfieldError, ValueError):
    pass


class NotGalois(AutfieldError):
    pass


class ExpressionSearchFailed(AutfieldError):
    pass


# embedding problems
class PresentationIncomplete(AutfieldError, ValueError):
    pass


class NotLinearlyDisjoint(AutfieldError):
    pass


class UpstreamUnverified(AutfieldError):
    pass


# constructions
class EqualParameters(AutfieldError, ValueError):
    pass


class CheckFailed(AutfieldError):
    def __init__(self, message: str, subtest: str = ""):
        super().__init__(message)
        self.subtest = subtest


class GadgetCollapse(AutfieldError):
    pass


# specialization
class NotIntegral(AutfieldError):
    pass


class BudgetExhausted(AutfieldError):
    def __init__(self, message: str, rejections=()):
        super().__init__(message)
        self.rejections = list(rejections)


class DegreeDrop(AutfieldError):
    pass


class TransferFailure(AutfieldError):
    pass


# pipeline
class CatalogMiss(AutfieldError):
    pass


class StageFailure(AutfieldError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause

    @property
    def reason(self) -> str:
        cause = self.cause
        return cause.reason if isinstance(cause, AutfieldError) else type(cause).__name__
