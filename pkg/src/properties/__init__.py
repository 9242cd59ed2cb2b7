from .materials import (
    FluidProps,
    SoilProps,
    WaterConstants,
    soil_heat_capacity,
    viscosity,
    water_heat_capacity,
)

__all__ = [
    "FluidProps",
    "SoilProps",
    "WaterConstants",
    "soil_heat_capacity",
    "viscosity",
    "water_heat_capacity",
]
