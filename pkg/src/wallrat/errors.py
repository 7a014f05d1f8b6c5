"""Exception hierarchy shared by all modules."""


class WallratError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WallratError, ValueError):
    """A point or parameter lies outside the region where it is required."""


class PoleError(WallratError, ZeroDivisionError):
    """Evaluation at (or numerically at) a pole."""


class NumericalError(WallratError, ArithmeticError):
    """Generic numerical degeneracy."""


class NonFiniteIntegrand(NumericalError):
    pass


class ZeroMassError(NumericalError):
    pass


class EvaluationError(NumericalError):
    pass


class TerminatedError(WallratError):
    """Stepping the Nevanlinna-Pick algorithm past a unimodular parameter."""


class DegenerateStep(NumericalError):
    pass


class ZeroDenominator(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class IllConditionedGram(NumericalError):
    pass


class DegenerateDisk(NumericalError):
    pass


class InfeasibleEpsilon(DomainError):
    pass


class ConstructionError(NumericalError):
    pass


class ConfigError(WallratError):
    """Malformed run configuration (CLI exit code 1)."""
