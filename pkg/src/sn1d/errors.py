"""Exception types raised across the package."""


class SN1DError(Exception):
    """Base class for all package errors."""


class InvalidBounds(SN1DError, ValueError):
    pass


class NegativeDensity(SN1DError, ValueError):
    pass


class NegativeInput(SN1DError, ValueError):
    pass


class AsymmetricInput(SN1DError, ValueError):
    pass


class DegenerateState(SN1DError, ValueError):
    pass


class InvalidStep(SN1DError, ValueError):
    pass


class MeshMismatch(SN1DError, ValueError):
    pass


class NoBracket(SN1DError, RuntimeError):
    pass


class NonConvergent(SN1DError, RuntimeError):
    pass


class ParityViolation(SN1DError, RuntimeError):
    pass


class BlowUp(SN1DError, RuntimeError):
    pass


class SolverBreakdown(SN1DError, RuntimeError):
    pass
