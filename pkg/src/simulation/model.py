# model.py
# Couples network pipes, soil columns, transfer stations and the ice
# storage into one right-hand side over a flat state vector.
#
# The valve position and the operating mode are held between controller
# samples; within one interval the right-hand side is a pure function of
# (t, y).

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import NonFiniteDerivativeError, ScenarioValidationError
from ..network.geometry import PipeGeometry, soil_layer_profile
from ..network.ground import (
    BoundaryClimate,
    SoilColumnParams,
    SoilDerivatives,
    boundary_temperature,
    first_layer_temperature,
    soil_column_params,
    soil_heat_content_rate,
    soil_rhs,
)
from ..network.hydraulics import (
    HEATING,
    REGENERATION,
    ScheduleEntry,
    StationParams,
    ValveControl,
    ValveOverride,
    flow_incidence,
    mixing_valve,
    pi_step,
    pump_power,
    split_constant_flow,
    station_mass_flow,
    station_rhs,
)
from ..network.pipe import (
    PipeSegmentParams,
    PipeSegmentState,
    darcy_pressure_drop,
    pipe_rhs,
    pipe_soil_conductance,
    segment_count,
)
from ..properties import FluidProps, SoilProps, WaterConstants, soil_heat_capacity
from ..scenario.demands import DemandSet
from ..storage.icestore import (
    EXTRACTION,
    REGENERATION as REGENERATION_STRING,
    IceStorageParams,
    IceStorageState,
    coil_outlet,
    coil_ua,
    concrete_soil_conductance,
    ice_fraction,
    shell_soil_conductance,
    storage_heat_content_rate,
    storage_rhs,
    wall_conductance,
)
from .state import StateRegistry, StateVector

logger = logging.getLogger(__name__)

DERIVED_COLUMNS = (
    "T_n_sup", "T_n_ret", "T_w_mean", "phi_ice_mean", "y", "mode", "m_n", "m_is", "m_bp",
    "Q_hhx_total", "Q_storage", "T_boundary", "dp_total", "P_el",
)

MODE_CODES = {HEATING: 0, REGENERATION: 1}
ACTIVE_STRING = {HEATING: EXTRACTION, REGENERATION: REGENERATION_STRING}

NETWORK = "network"
STORAGE = "storage"
STATION = "station"


@dataclass(frozen=True)
class HeldControls:
    y: float
    mode: str


@dataclass(frozen=True)
class Evaluation:
    """Everything one right-hand-side call computes, kept for outputs and audits."""

    derivative: np.ndarray
    T_boundary: float
    Q_hhx: np.ndarray
    m_seg: np.ndarray
    m_n: float
    m_is: float
    m_bp: float
    T_n_sup: float
    T_n_ret: float
    Q_storage: float
    soil_boundary_out: float
    storage_boundary_out: float


def _mix(weights, flows, temps):
    """Mass-weighted mixing per row of a 0/1 membership matrix; plain mean without flow."""
    total = weights @ flows
    mixed = weights @ (flows * temps)
    mean = (weights @ temps) / weights.sum(axis=1)
    safe = np.where(total > 0.0, total, 1.0)
    return np.where(total > 0.0, mixed / safe, mean)


class NetworkModel:
    """Assembled scenario: state layout, precomputed parameters and the coupled RHS."""

    def __init__(self, scenario, demands=None):
        self.scenario = scenario
        sc = scenario

        self.fluid = FluidProps(sc.fluid.density, sc.fluid.specific_heat,
                                tuple(tuple(row) for row in sc.fluid.viscosity_table))
        self.water = WaterConstants(**sc.water.model_dump())
        self.soil = SoilProps(**sc.soil.model_dump())
        self.climate = BoundaryClimate(sc.climate.T_min, sc.climate.T_max, sc.climate.t0)
        self.topology = sc.topology()
        self.consumers = list(self.topology.consumers)

        self._build_network()
        self._build_stations()
        self._build_storage()
        self._build_demands(demands)
        self._build_registry()
        self.reset_controls()

    # ==================== ASSEMBLY ====================

    def _build_network(self):
        sc = self.scenario
        net = sc.network
        pipes = {p.id: p for p in net.pipes}
        topo = self.topology

        radius, thickness, length, labels = [], [], [], []
        wall = {"density": [], "specific_heat": [], "conductivity": [], "alpha": []}
        columns, counts = [], []
        self.first_seg, self.last_seg = [], []
        seg_run = []

        for r, run in enumerate(topo.runs):
            cfg = pipes[run.id]
            n = segment_count(cfg.length, net.segment_length)
            material = cfg.material or sc.pipe_material
            g = PipeGeometry(cfg.inner_radius, cfg.wall_thickness, cfg.length / n)
            profile = soil_layer_profile(g, net.soil_layers, net.soil_thickness, cfg.half_distance)
            columns.append(soil_column_params(
                profile, self.soil, self.water,
                section_distance=cfg.section_distance,
                pair_distance=cfg.pair_distance,
                boundary_on_adjacent=net.boundary_on_adjacent,
            ))
            counts.append(n)

            self.first_seg.append(len(seg_run))
            for k in range(n):
                seg_run.append(r)
                labels.append(f"{run.id}/{k}")
                radius.append(cfg.inner_radius)
                thickness.append(cfg.wall_thickness)
                length.append(cfg.length / n)
                for key in wall:
                    wall[key].append(getattr(material, key))
            self.last_seg.append(len(seg_run) - 1)

        self.seg_run = np.array(seg_run)
        self.first_seg = np.array(self.first_seg)
        self.last_seg = np.array(self.last_seg)
        self.seg_labels = labels
        self.n_seg = len(seg_run)

        self.pipes = PipeSegmentParams(
            geometry=PipeGeometry(np.array(radius), np.array(thickness), np.array(length)),
            wall_density=np.array(wall["density"]),
            wall_specific_heat=np.array(wall["specific_heat"]),
            wall_conductivity=np.array(wall["conductivity"]),
            alpha=np.array(wall["alpha"]),
            fluid=self.fluid,
        )
        self.columns = SoilColumnParams.stack(columns, counts)
        self.G_ps = pipe_soil_conductance(self.pipes, net.soil_thickness, self.soil.conductivity)

        n_cons = len(self.consumers)
        cons_index = {c: k for k, c in enumerate(self.consumers)}
        self.junctions = [n for n in topo.graph if topo.kind(n) == "junction"]
        junc_index = {j: k for k, j in enumerate(self.junctions)}
        run_index = {run.id: r for r, run in enumerate(topo.runs)}

        # supply inlets index [T_f_sup..., T_n_sup]; return inlets index [T_f_ret..., T_hhx..., T_junction...]
        self.sup_src = np.empty(self.n_seg, dtype=int)
        self.ret_src = np.empty(self.n_seg, dtype=int)
        for r, run in enumerate(topo.runs):
            first, last = self.first_seg[r], self.last_seg[r]
            feeder = topo.incoming_run(run.parent)
            self.sup_src[first] = self.n_seg if feeder is None else self.last_seg[run_index[feeder.id]]
            self.sup_src[first + 1:last + 1] = np.arange(first, last)
            self.ret_src[first:last] = np.arange(first + 1, last + 1)
            if topo.kind(run.child) == "consumer":
                self.ret_src[last] = self.n_seg + cons_index[run.child]
            else:
                self.ret_src[last] = self.n_seg + n_cons + junc_index[run.child]

        self.incidence = flow_incidence(topo)
        self.junction_members = np.zeros((len(self.junctions), len(topo.runs)))
        for j, node in enumerate(self.junctions):
            for run in topo.outgoing_runs(node):
                self.junction_members[j, run_index[run.id]] = 1.0
        self.root_members = np.zeros((1, len(topo.runs)))
        for run in topo.outgoing_runs(topo.root):
            self.root_members[0, run_index[run.id]] = 1.0

        self.station_feed = np.array([self.last_seg[run_index[topo.incoming_run(c).id]] for c in self.consumers])
        self.path_matrix = np.zeros((n_cons, self.n_seg))
        for c, consumer in enumerate(self.consumers):
            for run in topo.path_to(consumer):
                r = run_index[run.id]
                self.path_matrix[c, self.first_seg[r]:self.last_seg[r] + 1] = 1.0

        logger.debug("network: %d runs split into %d segments", len(topo.runs), self.n_seg)

    def _build_stations(self):
        sc = self.scenario
        nodes = {n.id: n for n in sc.network.nodes}
        configs = [nodes[c].station or sc.station for c in self.consumers]
        self.stations = StationParams(
            mass=np.array([s.mass for s in configs]),
            delta_T=np.array([s.delta_T for s in configs]),
            specific_heat=self.fluid.specific_heat,
        )

    def _build_storage(self):
        cfg = self.scenario.storage.model_dump(exclude={"initial_temperature"})
        self.storage = IceStorageParams(soil=self.soil, fluid=self.fluid, water=self.water, **cfg)
        self.coil_geometry = PipeGeometry(
            self.storage.coil_inner_radius,
            self.storage.coil_thickness,
            self.storage.coil_length / self.storage.n_coils,
        )

    def _build_demands(self, demands):
        sc = self.scenario
        demands = demands if demands is not None else DemandSet([])
        errors = []
        series_ids = []
        for consumer in self.consumers:
            series_id = sc.series_for(consumer)
            if series_id in demands:
                series_ids.append(series_id)
            elif consumer in sc.demands.bindings:
                errors.append(f"demands.bindings.{consumer}: series {series_id!r} not found in demand data")
            else:
                if len(demands):
                    logger.warning("consumer %r has no demand series; assuming zero demand", consumer)
                series_ids.append(None)
        if errors:
            raise ScenarioValidationError(errors)
        self.demand_table = demands.table(series_ids)

    def _build_registry(self):
        net = self.scenario.network
        st = self.storage
        reg = StateRegistry()
        for var in ("T_f_sup", "T_p_sup", "T_f_ret", "T_p_ret"):
            reg.add(NETWORK, var, self.n_seg, labels=self.seg_labels)
        for var in ("T_s_o_sup", "T_s_a_sup", "T_s_o_ret", "T_s_a_ret"):
            reg.add(NETWORK, var, (self.n_seg, net.soil_layers), labels=self.seg_labels)
        for var in ("T_hx_extraction", "T_hx_regeneration", "T_w", "T_c"):
            reg.add(STORAGE, var, st.n_layers)
        reg.add(STORAGE, "T_s", (st.n_layers, st.soil_layers))
        reg.add(STATION, "T_hhx", len(self.consumers), labels=self.consumers)
        self.registry = reg
        logger.info("assembled %d states (%d pipe segments, %d consumers)",
                    reg.size, self.n_seg, len(self.consumers))

    def initial_state(self):
        sc = self.scenario
        T_b = boundary_temperature(self.climate, 0.0)
        T_net = sc.initial.network_temperature if sc.initial.network_temperature is not None else T_b
        T_station = sc.initial.station_temperature if sc.initial.station_temperature is not None else T_net
        soil = sc.initial.soil_layers if sc.initial.soil_layers is not None else [T_b] * sc.network.soil_layers
        soil = np.broadcast_to(np.asarray(soil, dtype=float), (self.n_seg, sc.network.soil_layers))
        T_store = sc.storage.initial_temperature

        parts = {f"{NETWORK}.{v}": T_net for v in ("T_f_sup", "T_p_sup", "T_f_ret", "T_p_ret")}
        parts.update({f"{NETWORK}.{v}": soil for v in ("T_s_o_sup", "T_s_a_sup", "T_s_o_ret", "T_s_a_ret")})
        parts.update({f"{STORAGE}.{v}": T_store for v in ("T_hx_extraction", "T_hx_regeneration", "T_w", "T_c")})
        parts[f"{STORAGE}.T_s"] = T_b
        parts[f"{STATION}.T_hhx"] = T_station
        return StateVector(self.registry.pack(parts), self.registry)

    # ==================== CONTROLS ====================

    def reset_controls(self):
        cfg = self.scenario.controller
        self.controller = ValveControl(
            schedule=[ScheduleEntry(e.day, e.setpoint, e.mode) for e in cfg.schedule],
            K_p=cfg.K_p,
            K_i=cfg.K_i,
            y=cfg.initial_position,
            t0=self.climate.t0,
            overrides=[ValveOverride(o.start_s, o.end_s, o.position) for o in cfg.overrides],
        )
        self.controls = HeldControls(self.controller.y, self.controller.mode)

    def sample(self, t, y, dt):
        """Controller sample at an output boundary; updates the held valve position and mode."""
        T_sup = self._evaluate(t, y).T_n_sup
        pi_step(self.controller, T_sup, t, dt)
        self.controls = HeldControls(self.controller.y, self.controller.mode)

    # ==================== RIGHT-HAND SIDE ====================

    def _station_flows(self, Q):
        m_c = station_mass_flow(self.stations, Q)
        constant = self.scenario.pump.constant_mass_flow
        if constant is not None:
            m_c = split_constant_flow(constant, m_c)
        return m_c

    def _evaluate(self, t, y):
        s = self.registry.unpack(y)
        T_b = boundary_temperature(self.climate, t)

        Q = self.demand_table.sample(t)
        m_c = self._station_flows(Q)
        run_flows = self.incidence @ m_c
        m_seg = run_flows[self.seg_run]
        m_n = float(self.root_members[0] @ run_flows)

        T_f_sup, T_p_sup = s["network.T_f_sup"], s["network.T_p_sup"]
        T_f_ret, T_p_ret = s["network.T_f_ret"], s["network.T_p_ret"]
        T_hhx = s["station.T_hhx"]

        ret_first = T_f_ret[self.first_seg]
        T_n_ret = float(_mix(self.root_members, run_flows, ret_first)[0])

        active = ACTIVE_STRING[self.controls.mode]
        store = IceStorageState(
            T_hx_extraction=s["storage.T_hx_extraction"],
            T_hx_regeneration=s["storage.T_hx_regeneration"],
            T_w=s["storage.T_w"],
            T_c=s["storage.T_c"],
            T_s=s["storage.T_s"],
        )
        T_out = coil_outlet(self.storage, store.coil(active))
        split = mixing_valve(self.controls.y, m_n, T_out, T_n_ret)
        d_store, store_flows = storage_rhs(self.storage, store, T_n_ret, split.m_is, active, T_b)

        T_in_sup = np.append(T_f_sup, split.T_sup)[self.sup_src]
        T_junction = _mix(self.junction_members, run_flows, ret_first) if self.junctions else np.empty(0)
        T_in_ret = np.concatenate([T_f_ret, T_hhx, T_junction])[self.ret_src]

        soil = {k: s[f"network.{k}"] for k in ("T_s_o_sup", "T_s_a_sup", "T_s_o_ret", "T_s_a_ret")}
        Q_ps_sup = self.G_ps * (T_p_sup - first_layer_temperature(self.columns, soil["T_s_o_sup"], soil["T_s_a_sup"]))
        Q_ps_ret = self.G_ps * (T_p_ret - first_layer_temperature(self.columns, soil["T_s_o_ret"], soil["T_s_a_ret"]))

        dT_f_sup, dT_p_sup = pipe_rhs(self.pipes, PipeSegmentState(T_f_sup, T_p_sup), T_in_sup, m_seg, Q_ps_sup)
        dT_f_ret, dT_p_ret = pipe_rhs(self.pipes, PipeSegmentState(T_f_ret, T_p_ret), T_in_ret, m_seg, Q_ps_ret)
        d_soil = soil_rhs(self.columns, soil["T_s_o_sup"], soil["T_s_a_sup"], soil["T_s_o_ret"], soil["T_s_a_ret"],
                          Q_ps_sup, Q_ps_ret, T_b)
        dT_hhx = station_rhs(self.stations, T_hhx, T_f_sup[self.station_feed], m_c, Q)

        derivative = self.registry.pack({
            "network.T_f_sup": dT_f_sup,
            "network.T_p_sup": dT_p_sup,
            "network.T_f_ret": dT_f_ret,
            "network.T_p_ret": dT_p_ret,
            "network.T_s_o_sup": d_soil.dT_o_sup,
            "network.T_s_a_sup": d_soil.dT_a_sup,
            "network.T_s_o_ret": d_soil.dT_o_ret,
            "network.T_s_a_ret": d_soil.dT_a_ret,
            "storage.T_hx_extraction": d_store.T_hx_extraction,
            "storage.T_hx_regeneration": d_store.T_hx_regeneration,
            "storage.T_w": d_store.T_w,
            "storage.T_c": d_store.T_c,
            "storage.T_s": d_store.T_s,
            "station.T_hhx": dT_hhx,
        })
        return Evaluation(
            derivative=derivative,
            T_boundary=T_b,
            Q_hhx=Q,
            m_seg=m_seg,
            m_n=m_n,
            m_is=split.m_is,
            m_bp=split.m_bp,
            T_n_sup=split.T_sup,
            T_n_ret=T_n_ret,
            Q_storage=store_flows.Q_storage,
            soil_boundary_out=float(np.sum(d_soil.boundary_out)),
            storage_boundary_out=store_flows.boundary_out,
        )

    def rhs(self, t, y):
        dy = self._evaluate(t, y).derivative
        if not np.all(np.isfinite(dy)):
            slot = int(np.flatnonzero(~np.isfinite(dy))[0])
            raise NonFiniteDerivativeError(self.registry.name(slot), t)
        return dy

    # ==================== OUTPUTS ====================

    @property
    def state_names(self):
        return self.registry.names

    @property
    def derived_names(self):
        return list(DERIVED_COLUMNS)

    def pressure_loss(self, t, y, ev=None):
        """Index-circuit loss: worst supply+return path to any consumer plus the active coil string."""
        if ev is None:
            ev = self._evaluate(t, y)
        s = self.registry.unpack(y)
        dp_sup = darcy_pressure_drop(self.pipes.geometry, self.fluid, ev.m_seg, s["network.T_f_sup"]).dp
        dp_ret = darcy_pressure_drop(self.pipes.geometry, self.fluid, ev.m_seg, s["network.T_f_ret"]).dp
        path = float(np.max(self.path_matrix @ (dp_sup + dp_ret))) if len(self.consumers) else 0.0

        active = ACTIVE_STRING[self.controls.mode]
        T_coil = float(np.mean(s[f"storage.T_hx_{active}"]))
        coil = darcy_pressure_drop(self.coil_geometry, self.fluid, ev.m_is / self.storage.n_coils, T_coil).dp
        return path + float(coil)

    def outputs(self, t, y):
        ev = self._evaluate(t, y)
        T_w = self.registry.view(y, "storage.T_w")
        dp_total = self.pressure_loss(t, y, ev)
        return {
            "T_n_sup": ev.T_n_sup,
            "T_n_ret": ev.T_n_ret,
            "T_w_mean": float(np.mean(T_w)),
            "phi_ice_mean": float(np.mean(ice_fraction(T_w, self.water))),
            "y": self.controls.y,
            "mode": MODE_CODES[self.controls.mode],
            "m_n": ev.m_n,
            "m_is": ev.m_is,
            "m_bp": ev.m_bp,
            "Q_hhx_total": float(np.sum(ev.Q_hhx)),
            "Q_storage": ev.Q_storage,
            "T_boundary": ev.T_boundary,
            "dp_total": dp_total,
            "P_el": pump_power(dp_total, ev.m_n, self.fluid.density, self.scenario.pump.efficiency),
        }

    # ==================== DIAGNOSTICS ====================

    def energy_audit(self, t, y):
        """Global balance of one evaluation: stored = injected - boundary."""
        ev = self._evaluate(t, y)
        d = ev.derivative
        s = self.registry.unpack(y)
        dv = self.registry.unpack(d)
        c_f = self.fluid.specific_heat
        q = self.pipes.quantities

        stored = 0.0
        for side in ("sup", "ret"):
            stored += np.sum(q.m_f * c_f * dv[f"network.T_f_{side}"])
            stored += np.sum(q.m_p * self.pipes.wall_specific_heat * dv[f"network.T_p_{side}"])
        stored += np.sum(soil_heat_content_rate(
            self.columns, s["network.T_s_o_sup"], s["network.T_s_a_sup"], s["network.T_s_o_ret"],
            s["network.T_s_a_ret"], SoilDerivatives(
                dv["network.T_s_o_sup"], dv["network.T_s_a_sup"], dv["network.T_s_o_ret"], dv["network.T_s_a_ret"],
                boundary_out=None,
            ),
        ))
        store_state = IceStorageState(*(s[f"storage.{v}"] for v in
                                        ("T_hx_extraction", "T_hx_regeneration", "T_w", "T_c", "T_s")))
        store_deriv = IceStorageState(*(dv[f"storage.{v}"] for v in
                                         ("T_hx_extraction", "T_hx_regeneration", "T_w", "T_c", "T_s")))
        stored += storage_heat_content_rate(self.storage, store_state, store_deriv)
        stored += np.sum(self.stations.mass * c_f * dv["station.T_hhx"])

        injected = float(np.sum(ev.Q_hhx))
        boundary = ev.soil_boundary_out + ev.storage_boundary_out
        return EnergyAudit(stored=float(stored), injected=injected, boundary_out=boundary)

    def time_constants(self):
        """Per-state estimate C / sum(G) at peak flow, in registry order."""
        c_f = self.fluid.specific_heat
        q = self.pipes.quantities
        col = self.columns
        st = self.storage
        g = st.geometry

        m_c = self._station_flows(self.demand_table.peak())
        m_seg = (self.incidence @ m_c)[self.seg_run]
        m_n = float(self.root_members[0] @ (self.incidence @ m_c))

        G_fp = self.pipes.fluid_wall_conductance
        tau_f = q.m_f * c_f / (G_fp + m_seg * c_f)
        tau_p = q.m_p * self.pipes.wall_specific_heat / (G_fp + self.G_ps)

        C_soil = min(soil_heat_capacity(self.soil, self.water, T) for T in (-5.0, -0.5, 5.0))

        def chain_tau(V, G, G_side, share):
            G_in = np.concatenate([share[:, None] * self.G_ps[:, None], G[:, :-1]], axis=1)
            total = G + G_in + G_side
            return np.where((V > 0) & (total > 0), V * C_soil / np.where(total > 0, total, 1.0), np.inf)

        tau_o = chain_tau(col.V_o, col.G_o, col.G_oa, col.share_o)
        tau_a = chain_tau(col.V_a, col.G_a, col.G_oa + col.G_b, col.share_a)

        ua = coil_ua(st, REGENERATION_STRING, 0.0)
        tau_hx = np.full(st.n_layers, g.m_hx * c_f / (ua + m_n / st.n_coils * c_f))
        # natural convection to both neighbours
        G_nc = 2.0 * st.water.conductivity * g.A_w / g.z_w
        tau_w = g.m_w * st.water.c_ice / (2.0 * st.n_coils * ua + wall_conductance(st) + G_nc)
        tau_c = g.m_c * st.concrete_specific_heat / (wall_conductance(st) + concrete_soil_conductance(st))
        G_shell = shell_soil_conductance(st)
        G_shell_in = np.concatenate([concrete_soil_conductance(st)[:, None], G_shell[:, :-1]], axis=1)
        tau_s = g.V_s * C_soil / (G_shell + G_shell_in)

        tau_hhx = np.where(m_c > 0, self.stations.mass / np.where(m_c > 0, m_c, 1.0), np.inf)

        return self.registry.pack({
            "network.T_f_sup": tau_f, "network.T_p_sup": tau_p,
            "network.T_f_ret": tau_f, "network.T_p_ret": tau_p,
            "network.T_s_o_sup": tau_o, "network.T_s_a_sup": tau_a,
            "network.T_s_o_ret": tau_o, "network.T_s_a_ret": tau_a,
            "storage.T_hx_extraction": tau_hx, "storage.T_hx_regeneration": tau_hx,
            "storage.T_w": tau_w, "storage.T_c": tau_c, "storage.T_s": tau_s,
            "station.T_hhx": tau_hhx,
        })


@dataclass(frozen=True)
class EnergyAudit:
    stored: float  # sum of heat capacity times dT/dt
    injected: float  # station heat flows into the network
    boundary_out: float  # heat leaving into the undisturbed soil

    @property
    def residual(self):
        return self.stored - (self.injected - self.boundary_out)


def assemble(scenario, demands=None):
    """Build the model and its initial state vector."""
    model = NetworkModel(scenario, demands)
    return model, model.initial_state()
