"""Nonclassicality potentials of vacuum-one-photon superposition states.

A single-mode qubit state is mixed with vacuum on a beam splitter (optionally
unbalanced and followed by phase damping); entanglement, steering and Bell
measures of the two-mode output quantify the nonclassicality of the input.
"""
__version__ = "0.1.0"

from .exceptions import DomainError, NumericalError
from .states import (
    IDEAL,
    ChannelParams,
    QubitState,
    TwoModeState,
    mix_with_vacuum,
    phase_damp,
    pure_vops,
    scissors_output,
    sigma_prime,
    two_mode_closed_form,
    vops,
)
from .correlations import concurrence, measures, negativity
from .potentials import Regime, classify_regime, potentials, regime_map
from .fit import FitResult, fit_model, uhlmann_fidelity

__all__ = [
    "__version__",
    "DomainError",
    "NumericalError",
    "IDEAL",
    "ChannelParams",
    "QubitState",
    "TwoModeState",
    "mix_with_vacuum",
    "phase_damp",
    "pure_vops",
    "scissors_output",
    "sigma_prime",
    "two_mode_closed_form",
    "vops",
    "concurrence",
    "measures",
    "negativity",
    "Regime",
    "classify_regime",
    "potentials",
    "regime_map",
    "FitResult",
    "fit_model",
    "uhlmann_fidelity",
]
