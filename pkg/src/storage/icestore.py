# icestore.py
# Buried latent ice storage: stratified water layers, two coil strings
# (extraction, regeneration), concrete shell and surrounding soil shells.
#
# Layer i = 0 is the BOTTOM layer next to the base, i = n_w - 1 sits under
# the lid. Coil fluid enters at the bottom unless ``inlet_at_bottom`` is off.

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..properties import WaterConstants, soil_heat_capacity, water_heat_capacity

logger = logging.getLogger(__name__)

EXTRACTION = "extraction"
REGENERATION = "regeneration"
STRINGS = (EXTRACTION, REGENERATION)

END_LAYER_COUPLINGS = ("parallel", "series")


@dataclass(frozen=True)
class IceStorageParams:
    water_radius: float
    water_volume: float
    n_layers: int
    n_coils: int
    coil_inner_radius: float
    coil_thickness: float
    coil_length: float  # total length of all coils of one string
    concrete_thickness: float
    concrete_density: float
    concrete_specific_heat: float
    concrete_conductivity: float
    soil_layers: int
    soil_thickness: float
    soil: object  # SoilProps
    alpha_fluid_coil: float
    alpha_coil_water: float
    alpha_water_concrete: float
    ice_conductivity: float
    coil_conductivity: float
    fluid: object  # FluidProps
    water: WaterConstants = field(default_factory=WaterConstants)
    end_layer_coupling: str = "parallel"
    inlet_at_bottom: bool = True

    def __post_init__(self):
        positive = (
            "water_radius", "water_volume", "coil_inner_radius", "coil_thickness", "coil_length",
            "concrete_thickness", "concrete_density", "concrete_specific_heat",
            "concrete_conductivity", "soil_thickness", "alpha_fluid_coil", "alpha_coil_water",
            "alpha_water_concrete", "ice_conductivity", "coil_conductivity",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ValueError(f"storage {name} must be > 0")
        if self.n_layers < 2:
            raise ValueError("storage needs at least 2 water layers")
        if self.n_coils < 1:
            raise ValueError("storage needs at least 1 coil")
        if self.soil_layers < 1:
            raise ValueError("storage needs at least 1 soil layer")
        if self.end_layer_coupling not in END_LAYER_COUPLINGS:
            raise ValueError(f"end_layer_coupling must be one of {END_LAYER_COUPLINGS}")

    @cached_property
    def geometry(self):
        return storage_geometry(self)


@dataclass(frozen=True)
class StorageGeometry:
    V_hx1: float
    V_hx2: float
    m_hx: float  # fluid mass per coil and layer
    V_is: float
    z_w: float
    m_w: float
    A_w: float
    V_c: np.ndarray  # (n_w,)
    m_c: np.ndarray
    V_s: np.ndarray  # (n_w, n_s)


def _end_rows(n):
    mask = np.zeros(n, dtype=bool)
    mask[[0, -1]] = True
    return mask


def storage_geometry(p):
    """Volumes and masses of the coil fluid, water layers, concrete rings and soil shells."""
    r_hx, d_hx = p.coil_inner_radius, p.coil_thickness
    V_hx1 = np.pi * r_hx ** 2 * p.coil_length
    V_hx2 = np.pi * (r_hx + d_hx) ** 2 * p.coil_length
    V_is = p.water_volume + V_hx2
    A_w = np.pi * p.water_radius ** 2
    z_w = V_is / (A_w * p.n_layers)

    ends = _end_rows(p.n_layers)
    r_c = p.water_radius + p.concrete_thickness
    V_c = np.full(p.n_layers, np.pi * (r_c ** 2 - p.water_radius ** 2) * z_w)
    V_c[ends] += A_w * p.concrete_thickness

    j = np.arange(1, p.soil_layers + 1)
    shell = np.pi * ((r_c + j * p.soil_thickness) ** 2 - (r_c + (j - 1) * p.soil_thickness) ** 2) * z_w
    V_s = np.tile(shell, (p.n_layers, 1))
    V_s[ends] += A_w * p.soil_thickness

    logger.debug("storage geometry: layer height %.3f m, %.1f kg water per layer, %.4f m3 coil fluid",
                 z_w, p.water.density * p.water_volume / p.n_layers, V_hx1)
    return StorageGeometry(
        V_hx1=float(V_hx1),
        V_hx2=float(V_hx2),
        m_hx=float(p.fluid.density * V_hx1 / (p.n_coils * p.n_layers)),
        V_is=float(V_is),
        z_w=float(z_w),
        m_w=float(p.water.density * p.water_volume / p.n_layers),
        A_w=float(A_w),
        V_c=V_c,
        m_c=p.concrete_density * V_c,
        V_s=V_s,
    )


def ice_fraction(T_w, consts=None):
    """Volume share of ice in a water layer, linear over the fusion band."""
    T_ice = (consts or WaterConstants()).T_solid
    phi = np.minimum(np.maximum(0.0, np.asarray(T_w, dtype=float) / T_ice), 1.0)
    return float(phi) if phi.ndim == 0 else phi


def ice_radius(p, phi):
    r_o = p.coil_inner_radius + p.coil_thickness
    r = np.sqrt(p.water_volume * np.asarray(phi, dtype=float) / (p.n_layers * np.pi * p.coil_length) + r_o ** 2)
    return float(r) if r.ndim == 0 else r


def coil_ua(p, string, phi):
    """Heat transfer coefficient times area of one coil within one layer."""
    r_hx = p.coil_inner_radius
    r_o = r_hx + p.coil_thickness
    resistance = (
        1.0 / (p.alpha_fluid_coil * r_hx)
        + np.log(r_o / r_hx) / p.coil_conductivity
        + 1.0 / (p.alpha_coil_water * r_hx)
    )
    if string == EXTRACTION:
        resistance = resistance + np.log(ice_radius(p, phi) / r_o) / p.ice_conductivity
    elif string != REGENERATION:
        raise ValueError(f"unknown coil string {string!r}")
    return 2.0 * np.pi * p.coil_length / p.n_coils / p.n_layers / resistance


def _upstream(p, T, T_inlet):
    if p.inlet_at_bottom:
        return np.concatenate([[T_inlet], T[:-1]])
    return np.concatenate([T[1:], [T_inlet]])


def coil_outlet(p, T_hx):
    return float(T_hx[-1] if p.inlet_at_bottom else T_hx[0])


def coil_rhs(p, string, T_hx, T_w, T_inlet, m_hx):
    """Derivatives of one string's coil temperatures and the coil-to-water flow per coil."""
    g = p.geometry
    c_f = p.fluid.specific_heat
    ua = coil_ua(p, string, ice_fraction(T_w, p.water))
    Q_w_hx = ua * (T_hx - T_w)
    dT_hx = (m_hx * c_f * (_upstream(p, T_hx, T_inlet) - T_hx) - Q_w_hx) / (g.m_hx * c_f)
    return dT_hx, Q_w_hx


def natural_convection(p, T_w):
    """Conduction-form exchange between layer i and i+1, positive upward into layer i."""
    g = p.geometry
    return p.water.conductivity * g.A_w / g.z_w * (T_w[1:] - T_w[:-1])


def wall_conductance(p):
    """Water-to-concrete conductance per layer.

    With the default ``"parallel"`` coupling the base and lid paths are added
    to the lateral ring at the end layers, so those layers conduct more than
    interior ones. ``"series"`` chains lateral and end paths into a single
    resistance and gives the end layers the smaller conductance.
    """
    g = p.geometry
    r_w, d_c = p.water_radius, p.concrete_thickness
    alpha, lam_c = p.alpha_water_concrete, p.concrete_conductivity
    log_half = np.log((r_w + d_c / 2.0) / r_w)

    G = np.full(p.n_layers, 2.0 * np.pi * g.z_w / (1.0 / (alpha * r_w) + log_half / lam_c))
    if p.end_layer_coupling == "parallel":
        end = G[0] + np.pi * r_w ** 2 / (1.0 / alpha + d_c / (2.0 * lam_c))
    else:
        end = np.pi / (
            1.0 / ((2.0 * r_w * g.z_w + r_w ** 2) * alpha)
            + log_half / (2.0 * lam_c * g.z_w)
            + (d_c / 2.0) / (lam_c * r_w ** 2)
        )
    G[_end_rows(p.n_layers)] = end
    return G


def wall_flows(p, T_w, T_c):
    """Heat flow from each water layer into its concrete ring."""
    return wall_conductance(p) * (T_w - T_c)


def water_rhs(p, T_w, Q_w_hx, T_c):
    """Water layer derivatives; ``Q_w_hx`` is the coil-to-water flow per coil, all strings summed."""
    g = p.geometry
    Q_nc = natural_convection(p, T_w)
    net = p.n_coils * Q_w_hx - wall_flows(p, T_w, T_c)
    net[:-1] += Q_nc
    net[1:] -= Q_nc
    return net / (g.m_w * water_heat_capacity(p.water, T_w))


def concrete_rhs(p, Q_w_c, Q_c_s):
    g = p.geometry
    return (Q_w_c - Q_c_s) / (g.m_c * p.concrete_specific_heat)


def concrete_soil_conductance(p):
    g = p.geometry
    r_w, d_c, d_s = p.water_radius, p.concrete_thickness, p.soil_thickness
    lam_c, lam_s = p.concrete_conductivity, p.soil.conductivity
    log_c = np.log((r_w + d_c) / (r_w + d_c / 2.0))
    log_s = np.log((r_w + d_c + d_s / 2.0) / (r_w + d_c))

    G = np.full(p.n_layers, 2.0 * np.pi * g.z_w / (log_c / lam_c + log_s / lam_s))
    if p.end_layer_coupling == "parallel":
        end = G[0] + np.pi * r_w ** 2 / (d_c / (2.0 * lam_c) + d_s / (2.0 * lam_s))
    else:
        end = np.pi / (
            log_c / (2.0 * lam_c * g.z_w)
            + log_s / (2.0 * lam_s * g.z_w)
            + (d_c / 2.0) / (lam_c * r_w ** 2)
            + (d_s / 2.0) / (lam_s * r_w ** 2)
        )
    G[_end_rows(p.n_layers)] = end
    return G


def shell_soil_conductance(p):
    """(n_w, n_s) conductances from soil shell j to j+1; the last column reaches the boundary."""
    g = p.geometry
    R = p.water_radius + p.concrete_thickness
    d = p.soil_thickness
    j = np.arange(1, p.soil_layers + 1)
    radial = 2.0 * p.soil.conductivity * np.pi * g.z_w / np.log((R + (j + 0.5) * d) / (R + (j - 0.5) * d))
    G = np.tile(radial, (p.n_layers, 1))
    G[_end_rows(p.n_layers)] += p.soil.conductivity / d * np.pi * p.water_radius ** 2
    return G


@dataclass(frozen=True)
class ShellSoilResult:
    Q_c_s: np.ndarray  # concrete -> first soil shell, per layer
    dT_s: np.ndarray  # (n_w, n_s)
    boundary_out: float


def shell_soil_rhs(p, T_c, T_s, T_boundary):
    g = p.geometry
    Q_c_s = concrete_soil_conductance(p) * (T_c - T_s[:, 0])
    T_next = np.concatenate([T_s[:, 1:], np.full((p.n_layers, 1), T_boundary)], axis=1)
    flows = shell_soil_conductance(p) * (T_s - T_next)
    inflow = np.concatenate([Q_c_s[:, None], flows[:, :-1]], axis=1)
    C = soil_heat_capacity(p.soil, p.water, T_s)
    dT_s = (inflow - flows) / (g.V_s * C)
    return ShellSoilResult(Q_c_s=Q_c_s, dT_s=dT_s, boundary_out=float(np.sum(flows[:, -1])))


@dataclass(frozen=True)
class IceStorageState:
    T_hx_extraction: np.ndarray
    T_hx_regeneration: np.ndarray
    T_w: np.ndarray
    T_c: np.ndarray
    T_s: np.ndarray  # (n_w, n_s)

    def coil(self, string):
        return self.T_hx_extraction if string == EXTRACTION else self.T_hx_regeneration


@dataclass(frozen=True)
class StorageFlows:
    T_outlet: float  # active string outlet
    Q_storage: float  # total coil -> water
    boundary_out: float
    Q_w_hx: np.ndarray  # per coil and layer, all strings


def storage_rhs(p, state, T_inlet, m_is, active, T_boundary):
    """Derivatives of the whole storage for one evaluation.

    Only the ``active`` string carries flow, split equally over the coils.
    The idle string still exchanges heat with the water.
    """
    if active not in STRINGS:
        raise ValueError(f"unknown coil string {active!r}")
    m_hx = m_is / p.n_coils

    d_hx = {}
    Q_w_hx = np.zeros(p.n_layers)
    for string in STRINGS:
        flow = m_hx if string == active else 0.0
        d_hx[string], Q = coil_rhs(p, string, state.coil(string), state.T_w, T_inlet, flow)
        Q_w_hx = Q_w_hx + Q

    shell = shell_soil_rhs(p, state.T_c, state.T_s, T_boundary)
    Q_w_c = wall_flows(p, state.T_w, state.T_c)
    derivative = IceStorageState(
        T_hx_extraction=d_hx[EXTRACTION],
        T_hx_regeneration=d_hx[REGENERATION],
        T_w=water_rhs(p, state.T_w, Q_w_hx, state.T_c),
        T_c=concrete_rhs(p, Q_w_c, shell.Q_c_s),
        T_s=shell.dT_s,
    )
    flows = StorageFlows(
        T_outlet=coil_outlet(p, state.coil(active)),
        Q_storage=float(p.n_coils * np.sum(Q_w_hx)),
        boundary_out=shell.boundary_out,
        Q_w_hx=Q_w_hx,
    )
    return derivative, flows


def storage_heat_content_rate(p, state, derivative):
    """Sum of heat capacity times dT/dt over every storage state (energy audit)."""
    g = p.geometry
    c_f = p.fluid.specific_heat
    coils = p.n_coils * g.m_hx * c_f * (np.sum(derivative.T_hx_extraction) + np.sum(derivative.T_hx_regeneration))
    water = np.sum(g.m_w * water_heat_capacity(p.water, state.T_w) * derivative.T_w)
    concrete = np.sum(g.m_c * p.concrete_specific_heat * derivative.T_c)
    soil = np.sum(g.V_s * soil_heat_capacity(p.soil, p.water, state.T_s) * derivative.T_s)
    return float(coils + water + concrete + soil)
