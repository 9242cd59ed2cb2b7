from .integrators import METHODS, get_integrator
from .model import DERIVED_COLUMNS, NetworkModel, assemble
from .runner import ODESystem, Trajectory, integrate, simulate
from .state import StateRegistry, StateVector

__all__ = [
    "DERIVED_COLUMNS",
    "METHODS",
    "NetworkModel",
    "ODESystem",
    "StateRegistry",
    "StateVector",
    "Trajectory",
    "assemble",
    "get_integrator",
    "integrate",
    "simulate",
]
