"""Collective atomic excitations in a dispersive cavity: spectrum, blockade and g2."""
__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError, ConvergenceError, CutoffError, DegenerateDenominatorError, DickeError,
    DispersiveRegimeError, IntegrationError, NearResonanceError, PreconditionError,
    UndefinedCoherenceError,
)
from .model import ModelParams, coupling_W, critical_points, driven_hamiltonian, effective_hamiltonian, spectrum  # noqa: F401
from .spin import DickeBasis, DensityMatrix, PureState, dicke_state, superposition  # noqa: F401
