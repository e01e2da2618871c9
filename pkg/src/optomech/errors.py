"""Exception types raised by the optomech package."""


class OptomechError(Exception):
    """Base class for all package errors."""


class ConfigError(OptomechError, ValueError):
    """Invalid or inconsistent configuration."""


class ConfigMissing(ConfigError):
    """A required configuration file or key is absent."""


class PoleOnRealAxis(OptomechError, ZeroDivisionError):
    """Susceptibility evaluated exactly on an undamped pole."""


class QuadratureNotConverged(OptomechError, ArithmeticError):
    pass


class BlueDetunedNoMinimum(OptomechError, ValueError):
    """Weak-coupling occupation requested for a non red-detuned drive."""


class GridTooNarrow(OptomechError, ValueError):
    pass


class SingularSigma(OptomechError, ArithmeticError):
    pass


class TruncationError(OptomechError, ArithmeticError):
    """Bessel series truncated too early for the requested tolerance."""


class StepTooLarge(OptomechError, ArithmeticError):
    pass


class NonFiniteState(OptomechError, ArithmeticError):
    pass


class FitNotConverged(OptomechError, ArithmeticError):
    pass


class InsufficientDecay(OptomechError, ValueError):
    """Ring-down too short to resolve the effective damping."""


class UnknownFigure(OptomechError, KeyError):
    pass


class BadAxisSpec(ConfigError):
    pass
