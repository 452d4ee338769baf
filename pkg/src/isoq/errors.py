"""Exception hierarchy.

Two roots: :class:`InputError` for anything the caller can fix by passing
different data (CLI exit code 2) and :class:`NumericalError` for failures of
a computation on admissible-looking input (CLI exit code 3).
"""


class IsoqError(Exception):
    pass


class InputError(IsoqError, ValueError):
    pass


class NumericalError(IsoqError, ArithmeticError):
    pass


# jets
class BaseMismatch(InputError):
    pass


class DivisionByIdenticallyZero(NumericalError, ZeroDivisionError):
    pass


class LaurentResult(NumericalError):
    """Division would produce negative powers."""


class BranchPointAtBase(NumericalError):
    pass


class OrderExhausted(InputError):
    pass


class ZeroJet(NumericalError):
    pass


# linear algebra
class NotInSpan(InputError):
    pass


class NotSymplectic(InputError):
    pass


class NotUnimodular(InputError):
    pass


# quadric
class NotLagrangian(InputError):
    pass


class OnHyperplaneSection(NumericalError):
    def __init__(self, section, msg=None):
        self.section = section
        super().__init__(msg or f"point lies on the hyperplane section {section}")


class OnQuadric(NumericalError):
    pass


class DegenerateSolve(NumericalError):
    pass


# curves
class PoleAtPoint(NumericalError):
    pass


class BranchPointAtPoint(NumericalError):
    pass


class ExprSyntaxError(InputError, SyntaxError):
    def __init__(self, msg, position):
        self.position = position
        self.msg = f"{msg} (at offset {position})"
        super().__init__(self.msg)

    def __str__(self):
        return self.msg


class NotLegendre(InputError):
    pass


class BothDiagonalEntriesVanish(NumericalError):
    pass


# frames
class SingularFrame(NumericalError):
    pass


class BranchPoint(NumericalError):
    pass


class AssociateBranchPoint(NumericalError):
    pass


class GaugeSolveFailed(NumericalError):
    pass


class HeptacticPoint(NumericalError):
    pass


class CycleCurve(NumericalError):
    pass


class ZeroDenominator(NumericalError):
    pass


class CriticalPoint(NumericalError):
    pass


class ExceptionalKappa(InputError):
    pass


# synthesis / deformation
class SingularityOnPath(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


class DVanishes(NumericalError):
    pass


class FrameUnavailable(InputError):
    pass


# surfaces / cli
class AtEnd(NumericalError):
    def __init__(self, kind, msg=None):
        self.kind = kind
        super().__init__(msg or f"point is an end of the {kind} surface")


class SingularJacobian(NumericalError):
    pass


class SchemaError(InputError):
    def __init__(self, msg, pointer=""):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {msg}")
