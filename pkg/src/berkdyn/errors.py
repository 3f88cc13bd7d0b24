"""Exception hierarchy shared by every module."""


class BerkError(Exception):
    """Base class for domain errors (CLI exit code 3)."""


class Unsupported(BerkError):
    """Computation outside the supported desk-scale range (CLI exit code 4)."""


class FieldConfigError(BerkError):
    pass


class DivisionByZero(BerkError, ZeroDivisionError):
    pass


class PrecisionExhausted(BerkError):
    pass


class NotIntegral(BerkError):
    pass


class NotASquare(BerkError):
    pass


class OddValuation(BerkError):
    pass


class ZeroPolynomial(BerkError):
    pass


class NotSquarefree(BerkError):
    pass


class NoRootsInField(BerkError):
    pass


class InfinityHasNoDiameter(BerkError):
    pass


class TypeIPoint(BerkError):
    pass


class SamePoint(BerkError):
    pass


class NotNested(BerkError):
    pass


class TypeIVLimit(Unsupported):
    pass


class ZeroFunction(BerkError):
    pass


class DegreesSplit(BerkError):
    pass


class HypothesisFails(BerkError):
    def __init__(self, msg, clause=None):
        super().__init__(msg)
        self.clause = clause


class HasZeros(BerkError):
    pass


class NotFixed(BerkError):
    pass


class BranchLeavesField(BerkError):
    pass


class IrreducibleFactorTooLarge(Unsupported):
    """Carries the records that were solved before the large factor was met."""

    def __init__(self, msg="", records=None):
        super().__init__(msg)
        self.records = list(records or [])


class FactorDegreeTooLarge(Unsupported):
    pass


class NotRepelling(BerkError):
    pass


class LeadingCoeffVanishes(BerkError):
    pass


class CollisionRadiusExceeded(BerkError):
    pass


class MultipleRoot(BerkError):
    pass


class ParseError(Exception):
    """Grammar error carrying the offending character offset (CLI exit code 2)."""

    def __init__(self, msg, pos=None):
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(msg + where)
        self.pos = pos
