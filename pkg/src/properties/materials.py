# materials.py
# Fluid, soil and water property models. All evaluation functions accept
# scalars or numpy arrays and are pure.

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FluidProps:
    """Network brine: constant density and heat capacity, tabulated viscosity."""

    density: float
    specific_heat: float
    # (temperature °C, dynamic viscosity Pa·s) pairs, strictly increasing in T
    viscosity_table: tuple

    def __post_init__(self):
        if self.density <= 0:
            raise ValueError("fluid density must be > 0")
        if self.specific_heat <= 0:
            raise ValueError("fluid specific heat must be > 0")

        table = tuple((float(t), float(mu)) for t, mu in self.viscosity_table)
        if len(table) < 2:
            raise ValueError("viscosity table needs at least 2 entries")
        temps = np.array([t for t, _ in table])
        mus = np.array([mu for _, mu in table])
        if np.any(np.diff(temps) <= 0):
            raise ValueError("viscosity table temperatures must be strictly increasing")
        if np.any(mus <= 0):
            raise ValueError("viscosities must be > 0")

        object.__setattr__(self, "viscosity_table", table)
        object.__setattr__(self, "_temps", temps)
        object.__setattr__(self, "_mus", mus)


@dataclass(frozen=True)
class SoilProps:
    density: float
    dry_specific_heat: float
    conductivity: float
    water_share: float

    def __post_init__(self):
        for name in ("density", "dry_specific_heat", "conductivity"):
            if getattr(self, name) <= 0:
                raise ValueError(f"soil {name} must be > 0")
        if not 0.0 <= self.water_share <= 1.0:
            raise ValueError("soil water share must lie in [0, 1]")


@dataclass(frozen=True)
class WaterConstants:
    """Water/ice constants; the fusion enthalpy is normalised to a 1 K band."""

    c_w: float = 4182.0
    c_ice: float = 2100.0
    dh_fus: float = 333550.0
    conductivity: float = 0.6
    density: float = 1000.0
    T_fluid: float = 0.0
    T_solid: float = -1.0

    def __post_init__(self):
        if not self.dh_fus > self.c_w > self.c_ice > 0:
            raise ValueError("water constants must satisfy dh_fus > c_w > c_ice > 0")
        if self.T_solid >= self.T_fluid:
            raise ValueError("T_solid must be below T_fluid")
        if self.conductivity <= 0 or self.density <= 0:
            raise ValueError("water conductivity and density must be > 0")


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


def viscosity(props, T):
    """Piecewise-linear interpolation of the viscosity table, clamped at both ends."""
    return _scalar_or_array(np.interp(T, props._temps, props._mus))


def _phase_select(consts, T, liquid, solid, fusion):
    T = np.asarray(T, dtype=float)
    return np.where(T > consts.T_fluid, liquid, np.where(T < consts.T_solid, solid, fusion))


def soil_heat_capacity(props, consts, T):
    """Volumetric heat capacity J/(m³·K) of moist soil in its current phase regime."""
    dry = (1.0 - props.water_share) * props.dry_specific_heat
    w = props.water_share
    C = props.density * _phase_select(
        consts, T, dry + consts.c_w * w, dry + consts.c_ice * w, dry + consts.dh_fus * w
    )
    return _scalar_or_array(C)


def water_heat_capacity(consts, T):
    """Specific heat J/(kg·K) of storage water: liquid, ice or fusion band."""
    return _scalar_or_array(_phase_select(consts, T, consts.c_w, consts.c_ice, consts.dh_fus))
