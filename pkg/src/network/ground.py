# ground.py
# Soil columns around the supply/return pipe pairs.
#
# Each pipe is surrounded by n_s layers, every layer split into an outer
# section (facing away from the partner pipe) and an adjacent section
# (facing it). Flows are positive in the direction of the first named
# temperature, i.e. Q = G * (T_first - T_second).

import logging
from dataclasses import dataclass

import numpy as np

from ..properties import soil_heat_capacity

logger = logging.getLogger(__name__)

SECONDS_PER_HOUR = 3600.0
HOURS_PER_YEAR = 8760.0
COLDEST_HOUR = 900.0


@dataclass(frozen=True)
class BoundaryClimate:
    """Undisturbed soil temperature at installation depth over the year."""

    T_min: float
    T_max: float
    t0: float = 0.0  # seconds since the start of the year at simulation start

    def __post_init__(self):
        if self.T_min > self.T_max:
            raise ValueError("T_min must not exceed T_max")


def boundary_temperature(climate, t):
    hours = (climate.t0 + t) / SECONDS_PER_HOUR
    a = -0.5 * np.cos(2.0 * np.pi * (hours - COLDEST_HOUR) / HOURS_PER_YEAR) + 0.5
    T = climate.T_min + a * (climate.T_max - climate.T_min)
    return float(T) if np.ndim(T) == 0 else T


def precipitation_heat_input(precipitation, c_w, T_precipitation, T_soil):
    """Annual sensible heat carried into the soil by rain, in kWh/(m²·a).

    ``precipitation`` in kg/(m²·a), ``c_w`` in J/(kg·K). Only a sanity
    figure; the soil model never uses it.
    """
    return precipitation * c_w * (T_precipitation - T_soil) / 3.6e6


def _layer_log_ratio(profile, i):
    R = profile.radius[0]
    d = profile.thickness
    if i < profile.n_layers:
        return np.log((R + (i + 0.5) * d) / (R + (i - 0.5) * d))
    return np.log((R + i * d) / (R + (i - 0.5) * d))


def _radial_base(profile, props):
    # conductance of an unreduced hollow cylinder from layer i to i+1; the
    # last entry reaches the boundary at the outer edge of layer n_s
    ratios = np.array([_layer_log_ratio(profile, i) for i in range(1, profile.n_layers + 1)])
    return 2.0 * props.conductivity * np.pi * profile.length / ratios


def radial_layer_flow(profile, props, T_i, T_next, i, side):
    """Heat flow from layer i to layer i+1 (the boundary when i = n_s) of one section."""
    if not 1 <= i <= profile.n_layers:
        raise ValueError(f"layer index {i} outside 1..{profile.n_layers}")
    if side not in ("outer", "adjacent"):
        raise ValueError(f"unknown soil section {side!r}")
    k = profile.k_o[i - 1] if side == "outer" else profile.k_a[i - 1]
    G = 2.0 * props.conductivity * np.pi * profile.length / _layer_log_ratio(profile, i)
    return float(G * k * (T_i - T_next))


def default_section_distance(profile):
    """Circumferential distance between the outer and adjacent centroids of every layer."""
    mean_radius = (profile.radius[1:] + profile.radius[:-1]) / 2.0
    return (2.0 * np.pi - profile.beta) / (2.0 * np.pi) * np.pi * mean_radius


def default_pair_distance(profile):
    return 2.0 * profile.half_distance


def outer_adjacent_flow(profile, props, T_o, T_a, i, distance=None):
    if not 1 <= i <= profile.n_layers:
        raise ValueError(f"layer index {i} outside 1..{profile.n_layers}")
    d = default_section_distance(profile)[i - 1] if distance is None else distance
    A_s = profile.thickness * profile.length
    return float(props.conductivity * A_s / d * (T_o - T_a))


def supply_return_flow(profile, props, T_sup, T_ret, i, distance=None):
    """Heat flow from the supply side's adjacent layer i into the return side's."""
    if not 1 <= i <= profile.n_layers:
        raise ValueError(f"layer index {i} outside 1..{profile.n_layers}")
    if profile.height[i] == 0.0:
        return 0.0
    d = default_pair_distance(profile) if distance is None else distance
    A_b = (profile.height[i] - profile.height[i - 1]) * profile.length
    return float(props.conductivity * A_b / d * (T_sup - T_ret))


@dataclass(frozen=True)
class SoilColumnParams:
    """Precomputed volumes and conductances of soil columns.

    Every array has shape (..., n_s); a single profile gives 1-D arrays,
    ``stack`` repeats profiles into an (n_segments, n_s) bundle.
    """

    V_o: np.ndarray
    V_a: np.ndarray
    G_o: np.ndarray  # outer chain, layer i -> i+1 (boundary at the end)
    G_a: np.ndarray  # adjacent chain
    G_oa: np.ndarray  # outer <-> adjacent of the same layer
    G_b: np.ndarray  # supply adjacent <-> return adjacent
    share_o: np.ndarray  # pipe heat share of the first outer layer
    share_a: np.ndarray
    props: object  # SoilProps
    consts: object  # WaterConstants

    @property
    def n_layers(self):
        return self.V_o.shape[-1]

    @classmethod
    def stack(cls, columns, repeats):
        """Bundle per-run columns, repeating each run's column once per segment."""
        if not columns:
            raise ValueError("no soil columns to stack")

        def rep(name):
            return np.repeat(np.stack([getattr(c, name) for c in columns]), repeats, axis=0)

        return cls(
            V_o=rep("V_o"),
            V_a=rep("V_a"),
            G_o=rep("G_o"),
            G_a=rep("G_a"),
            G_oa=rep("G_oa"),
            G_b=rep("G_b"),
            share_o=np.repeat(np.array([c.share_o for c in columns], dtype=float), repeats),
            share_a=np.repeat(np.array([c.share_a for c in columns], dtype=float), repeats),
            props=columns[0].props,
            consts=columns[0].consts,
        )


def soil_column_params(profile, props, consts, section_distance=None, pair_distance=None,
                       boundary_on_adjacent=True):
    d_s = default_section_distance(profile) if section_distance is None \
        else np.broadcast_to(np.asarray(section_distance, dtype=float), (profile.n_layers,))
    d_sb = default_pair_distance(profile) if pair_distance is None else float(pair_distance)
    if np.any(d_s <= 0) or d_sb <= 0:
        raise ValueError("soil exchange distances must be > 0")

    base = _radial_base(profile, props)
    G_o = base * profile.k_o
    G_a = base * profile.k_a
    if not boundary_on_adjacent:
        G_a = G_a.copy()
        G_a[-1] = 0.0

    G_oa = props.conductivity * profile.thickness * profile.length / d_s
    A_b = np.diff(profile.height) * profile.length
    G_b = np.where(profile.height[1:] > 0.0, props.conductivity * A_b / d_sb, 0.0)

    # adjacent cells without volume (no intersection, beta = 0) take no part
    live = profile.V_a > 0.0
    if not np.all(live):
        logger.debug("%d of %d adjacent soil cells have no volume and are inert", int(np.sum(~live)), live.size)
    G_a = np.where(live, G_a, 0.0)
    G_oa = np.where(live, G_oa, 0.0)
    G_b = np.where(live, G_b, 0.0)

    k_sum = profile.k_o[0] + profile.k_a[0]
    return SoilColumnParams(
        V_o=profile.V_o.copy(),
        V_a=profile.V_a.copy(),
        G_o=G_o,
        G_a=G_a,
        G_oa=G_oa,
        G_b=G_b,
        share_o=float(profile.k_o[0] / k_sum),
        share_a=float(profile.k_a[0] / k_sum),
        props=props,
        consts=consts,
    )


def first_layer_temperature(params, T_o, T_a):
    """Share-weighted first-layer temperature seen by the pipe wall."""
    return params.share_o * T_o[..., 0] + params.share_a * T_a[..., 0]


def _chain_flows(G, T, T_boundary):
    T_boundary = np.broadcast_to(np.asarray(T_boundary, dtype=float), T.shape[:-1])
    T_next = np.concatenate([T[..., 1:], T_boundary[..., None]], axis=-1)
    return G * (T - T_next)


def _inflow(flows):
    # the flow leaving layer i-1 enters layer i; layer 1 gets its heat from the pipe
    return np.concatenate([np.zeros_like(flows[..., :1]), flows[..., :-1]], axis=-1)


@dataclass(frozen=True)
class SoilDerivatives:
    dT_o_sup: np.ndarray
    dT_a_sup: np.ndarray
    dT_o_ret: np.ndarray
    dT_a_ret: np.ndarray
    boundary_out: np.ndarray  # heat leaving both columns into the undisturbed soil, per segment


def _capacity(params, T):
    return soil_heat_capacity(params.props, params.consts, T)


def soil_rhs(params, T_o_sup, T_a_sup, T_o_ret, T_a_ret, Q_ps_sup, Q_ps_ret, T_boundary):
    """Temperature derivatives of the supply and return soil columns."""
    Q_b = params.G_b * (T_a_sup - T_a_ret)
    V_a_safe = np.where(params.V_a > 0.0, params.V_a, 1.0)
    boundary_out = 0.0
    out = []

    for T_o, T_a, Q_ps, cross in ((T_o_sup, T_a_sup, Q_ps_sup, -Q_b), (T_o_ret, T_a_ret, Q_ps_ret, Q_b)):
        flows_o = _chain_flows(params.G_o, T_o, T_boundary)
        flows_a = _chain_flows(params.G_a, T_a, T_boundary)
        Q_oa = params.G_oa * (T_o - T_a)

        net_o = _inflow(flows_o) - flows_o - Q_oa
        net_a = _inflow(flows_a) - flows_a + Q_oa + cross
        net_o[..., 0] += params.share_o * Q_ps
        net_a[..., 0] += params.share_a * Q_ps

        dT_o = net_o / (params.V_o * _capacity(params, T_o))
        dT_a = np.where(params.V_a > 0.0, net_a / (V_a_safe * _capacity(params, T_a)), 0.0)
        out.extend([dT_o, dT_a])
        boundary_out = boundary_out + flows_o[..., -1] + flows_a[..., -1]

    return SoilDerivatives(*out, boundary_out=boundary_out)


def soil_heat_content_rate(params, T_o_sup, T_a_sup, T_o_ret, T_a_ret, d):
    """Sum of V·C·dT/dt over all soil cells, per segment (energy audit)."""
    total = 0.0
    for T, dT, V in ((T_o_sup, d.dT_o_sup, params.V_o), (T_a_sup, d.dT_a_sup, params.V_a),
                     (T_o_ret, d.dT_o_ret, params.V_o), (T_a_ret, d.dT_a_ret, params.V_a)):
        total = total + np.sum(V * _capacity(params, T) * dT, axis=-1)
    return total
