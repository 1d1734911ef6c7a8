"""Exception hierarchy shared by all modules."""


class DickeError(Exception):
    """Base class for every physics or numerics failure raised by the package."""


class PreconditionError(DickeError, ValueError):
    """An input violates a documented precondition (shape, Hermiticity, range)."""


class DispersiveRegimeError(PreconditionError):
    """Zero detuning: the effective interaction W = g0^2/(N*Delta) is undefined."""


class IntegrationError(DickeError):
    """Fixed-step integration became unstable (trace drift)."""


class ConvergenceError(DickeError):
    """Steady-state search did not converge within the allowed horizon."""


class UndefinedCoherenceError(DickeError):
    """The normalising expectation <J+J-> vanishes, so g2 is undefined."""


class NearResonanceError(DickeError):
    """An energy gap used as a perturbative denominator is (numerically) zero."""


class DegenerateDenominatorError(DickeError):
    """A closed-form g2 expression has a non-positive denominator."""


class CutoffError(DickeError):
    """The photon Fock-space truncation is too small for the requested sector."""


class ConfigError(DickeError, ValueError):
    """A scenario document is missing keys or contains contradictory keys."""
