"""Finite-size form factors of the massless XXZ chain and their asymptotics."""

from .model import ModelParams
from .bethe import ExcitationSpec, BetheState, solve_bethe_state
from .thermo import ThermoGrid, build_thermo, shift_function_limit

__all__ = [
    "ModelParams",
    "ExcitationSpec",
    "BetheState",
    "solve_bethe_state",
    "ThermoGrid",
    "build_thermo",
    "shift_function_limit",
]
