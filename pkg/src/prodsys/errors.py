"""Exception hierarchy shared by every module."""


class ProdSysError(ValueError):
    """Base class for all library errors."""


class NotPSD(ProdSysError):
    pass


class TotalMismatch(ProdSysError):
    pass


class LevelTooCoarse(ProdSysError):
    pass


class NotRefinement(ProdSysError):
    pass


class DimMismatch(ProdSysError):
    pass


class NotInclusionSystem(ProdSysError):
    pass


class NotSubsystem(ProdSysError):
    pass


class LevelMismatch(ProdSysError):
    pass


class OutOfRange(ProdSysError):
    pass


class AllZero(ProdSysError):
    pass


class NotAUnit(ProdSysError):
    pass


class NotAdditive(ProdSysError):
    pass


class NotNormalized(ProdSysError):
    pass


class NotProduct(ProdSysError):
    pass


class NoUnit(ProdSysError):
    pass


class SizeLimit(ProdSysError):
    pass


class NotContractive(ProdSysError):
    pass


class NotMorphism(ProdSysError):
    pass


class NotPartialIsometry(ProdSysError):
    pass


class UnitNotSupported(ProdSysError):
    pass


class ShapeMismatch(ProdSysError):
    pass


class LevelOrder(ProdSysError):
    pass


class NotProductSubsystem(ProdSysError):
    pass


class StateNotFaithful(ProdSysError):
    pass


class UnknownSuite(ProdSysError):
    pass


class ConfigError(ProdSysError):
    pass
