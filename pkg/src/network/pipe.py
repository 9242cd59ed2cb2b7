# pipe.py
# One finite volume of an uninsulated network pipe: fluid + wall energy
# balances and the Blasius/Darcy-Weisbach pressure loss.
#
# All functions broadcast over numpy arrays, so a PipeSegmentParams whose
# geometry holds arrays describes a whole bundle of segments.

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..properties import viscosity
from .geometry import pipe_geometry

BLASIUS_COEFFICIENT = 0.3164


@dataclass(frozen=True)
class PipeSegmentState:
    T_f: float
    T_p: float


@dataclass(frozen=True)
class PipeSegmentParams:
    geometry: object  # PipeGeometry
    wall_density: float
    wall_specific_heat: float
    wall_conductivity: float
    alpha: float  # fluid-wall heat transfer coefficient W/(m²·K)
    fluid: object  # FluidProps

    def __post_init__(self):
        # fields may be per-segment arrays
        if np.any(np.asarray(self.wall_conductivity) <= 0) or np.any(np.asarray(self.alpha) <= 0) \
                or np.any(np.asarray(self.wall_specific_heat) <= 0):
            raise ValueError("wall conductivity, heat transfer coefficient and heat capacity must be > 0")

    @cached_property
    def quantities(self):
        return pipe_geometry(self.geometry, self.fluid.density, self.wall_density)

    @cached_property
    def fluid_wall_conductance(self):
        g = self.geometry
        r = g.inner_radius
        resistance = 1.0 / (r * self.alpha) + np.log((r + g.wall_thickness / 2.0) / r) / self.wall_conductivity
        return 2.0 * np.pi * g.length / resistance


def segment_count(run_length, target_length):
    """Number of equal finite volumes for a pipe run."""
    return max(1, math.ceil(run_length / target_length - 1e-9))


def fluid_wall_heat_flow(params, T_f, T_p):
    return params.fluid_wall_conductance * (T_f - T_p)


def pipe_soil_conductance(params, soil_thickness, soil_conductivity):
    """Series conduction from the wall centre through half a wall and half a soil layer."""
    g = params.geometry
    r_o = g.outer_radius
    resistance = (
        np.log(r_o / (g.inner_radius + g.wall_thickness / 2.0)) / params.wall_conductivity
        + np.log((r_o + soil_thickness / 2.0) / r_o) / soil_conductivity
    )
    return 2.0 * np.pi * g.length / resistance


def pipe_soil_heat_flow(params, soil_thickness, soil_conductivity, T_p, T_s1):
    return pipe_soil_conductance(params, soil_thickness, soil_conductivity) * (T_p - T_s1)


def pipe_rhs(params, state, T_in, m_dot, Q_ps):
    """Time derivatives (dT_f/dt, dT_p/dt) of one pipe volume with directed flow m_dot >= 0."""
    q = params.quantities
    c_f = params.fluid.specific_heat
    Q_fp = fluid_wall_heat_flow(params, state.T_f, state.T_p)
    dT_f = (m_dot * c_f * (T_in - state.T_f) - Q_fp) / (q.m_f * c_f)
    dT_p = (Q_fp - Q_ps) / (q.m_p * params.wall_specific_heat)
    return dT_f, dT_p


@dataclass(frozen=True)
class PressureDrop:
    dp: float
    friction: float
    reynolds: float


def pressure_drop(params, m_dot, T_f):
    """Darcy-Weisbach loss with the Blasius friction factor at every Reynolds number.

    Viscosity is taken at the segment's fluid temperature. Zero flow gives
    zero loss, friction and Reynolds number.
    """
    return darcy_pressure_drop(params.geometry, params.fluid, m_dot, T_f)


def darcy_pressure_drop(g, fluid, m_dot, T_f):
    m_dot = np.asarray(m_dot, dtype=float)
    diameter = 2.0 * g.inner_radius
    mu = viscosity(fluid, T_f)

    reynolds = m_dot * diameter / (mu * np.pi * g.inner_radius ** 2)
    flowing = reynolds > 0.0
    safe_re = np.where(flowing, reynolds, 1.0)
    friction = np.where(flowing, BLASIUS_COEFFICIENT * safe_re ** -0.25, 0.0)
    dp = 8.0 * g.length * m_dot ** 2 / (fluid.density * np.pi ** 2 * diameter ** 5) * friction

    if dp.ndim == 0:
        return PressureDrop(float(dp), float(friction), float(reynolds))
    return PressureDrop(dp, friction, reynolds)
