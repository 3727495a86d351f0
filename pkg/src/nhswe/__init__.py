"""1D non-hydrostatic shallow-water solver for moving-bottom waves."""

from .closure import CLOSURES, PhysParams
from .dgmesh import Field, Mesh1D
from .predictor import BoundarySpec, HydroState, Predictor
from .presets import PRESETS, get_preset
from .stepper import RunConfig, RunResult, Simulation, run

__all__ = [
    "CLOSURES", "PhysParams", "Field", "Mesh1D", "BoundarySpec",
    "HydroState", "Predictor", "PRESETS", "get_preset", "RunConfig",
    "RunResult", "Simulation", "run",
]

__version__ = "0.1.0"
