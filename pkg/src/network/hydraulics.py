# hydraulics.py
# Transfer stations, storage mixing valve with its sampled PI controller,
# circulation pump and mass-flow routing over the network tree.

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

logger = logging.getLogger(__name__)

HEATING = "heating"
REGENERATION = "regeneration"
MODES = (HEATING, REGENERATION)

SECONDS_PER_DAY = 86400.0
DAYS_PER_YEAR = 365.0


@dataclass(frozen=True)
class StationParams:
    mass: float  # primary-side fluid mass m_hhx
    delta_T: float  # design temperature spread
    specific_heat: float

    def __post_init__(self):
        if np.any(np.asarray(self.mass) <= 0) or np.any(np.asarray(self.delta_T) <= 0) \
                or self.specific_heat <= 0:
            raise ValueError("station mass, temperature spread and specific heat must be > 0")


def station_rhs(params, T_hhx, T_in, m_hhx, Q_hhx):
    """Primary-side heat exchanger temperature; Q_hhx > 0 injects heat into the network."""
    c_f = params.specific_heat
    return (m_hhx * c_f * (T_in - T_hhx) + Q_hhx) / (params.mass * c_f)


def station_mass_flow(params, Q_hhx):
    return np.abs(Q_hhx) / (params.specific_heat * params.delta_T)


@dataclass(frozen=True)
class ValveSplit:
    m_is: float
    m_bp: float
    T_sup: float


def mixing_valve(y, m_n, T_storage_out, T_bypass):
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"valve position {y} outside [0, 1]")
    m_is = y * m_n
    m_bp = m_n - m_is
    if m_n <= 0.0:
        return ValveSplit(m_is=0.0, m_bp=0.0, T_sup=T_bypass)
    return ValveSplit(m_is=m_is, m_bp=m_bp, T_sup=(m_is * T_storage_out + m_bp * T_bypass) / m_n)


@dataclass(frozen=True)
class ScheduleEntry:
    day: float  # day of year, 0 = 1 January 00:00
    setpoint: float
    mode: str = HEATING

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown controller mode {self.mode!r}")


@dataclass(frozen=True)
class ValveOverride:
    start: float
    end: float
    position: float

    def covers(self, t):
        return self.start <= t < self.end


def day_of_year(t0, t):
    return ((t0 + t) / SECONDS_PER_DAY) % DAYS_PER_YEAR


@dataclass
class ValveControl:
    """Discrete-time velocity-form PI acting on the storage valve.

    ``e_prev`` is None until the first sample, so the first step carries
    no proportional kick.
    """

    schedule: list
    K_p: float = 0.05
    K_i: float = 1e-4
    y: float = 0.0
    t0: float = 0.0
    overrides: list = field(default_factory=list)
    e_prev: Optional[float] = None
    mode: Optional[str] = None

    def __post_init__(self):
        if not self.schedule:
            raise ValueError("controller schedule must not be empty")
        self.schedule = sorted(self.schedule, key=lambda entry: entry.day)
        if not 0.0 <= self.y <= 1.0:
            raise ValueError("initial valve position must lie in [0, 1]")
        if self.mode is None:
            self.mode = self.active_entry(0.0).mode

    def active_entry(self, t):
        day = day_of_year(self.t0, t)
        current = self.schedule[-1]
        for entry in self.schedule:
            if entry.day <= day:
                current = entry
        return current

    def override_at(self, t):
        for override in self.overrides:
            if override.covers(t):
                return override
        return None


def control_error(ctrl, T_sup, t):
    entry = ctrl.active_entry(t)
    e = entry.setpoint - T_sup
    return -e if entry.mode == REGENERATION else e


def pi_step(ctrl, T_sup, t, dt):
    """Advance the controller by one sample and return the new valve position."""
    if dt <= 0:
        raise ValueError("controller sample time must be > 0")

    entry = ctrl.active_entry(t)
    if entry.mode != ctrl.mode:
        logger.debug("controller switches %s -> %s at t=%.0f s", ctrl.mode, entry.mode, t)
        ctrl.mode = entry.mode
        ctrl.e_prev = None

    e = control_error(ctrl, T_sup, t)
    override = ctrl.override_at(t)
    if override is not None:
        ctrl.y = float(np.clip(override.position, 0.0, 1.0))
        ctrl.e_prev = e
        return ctrl.y

    e_prev = e if ctrl.e_prev is None else ctrl.e_prev
    ctrl.y = float(np.clip(ctrl.y + ctrl.K_p * (e - e_prev) + ctrl.K_i * e * dt, 0.0, 1.0))
    ctrl.e_prev = e
    return ctrl.y


def pump_power(dp_total, m_n, rho_f, efficiency):
    if not 0.0 < efficiency <= 1.0:
        raise ValueError(f"pump efficiency {efficiency} outside (0, 1]")
    return dp_total * m_n / (rho_f * efficiency)


def flow_incidence(topology):
    """(n_runs, n_consumers) 0/1 matrix: run r carries consumer c's flow."""
    matrix = np.zeros((len(topology.runs), len(topology.consumers)))
    column = {c: k for k, c in enumerate(topology.consumers)}
    for r, run in enumerate(topology.runs):
        for consumer in topology.downstream_consumers(run):
            matrix[r, column[consumer]] = 1.0
    return matrix


def route_mass_flows(topology, station_flows):
    """Per-run mass flows and the root flow from consumer station flows.

    ``station_flows`` maps consumer id to kg/s. Returns ``(run_flows, m_n)``
    with ``run_flows`` keyed by run id.
    """
    flows = np.array([station_flows.get(c, 0.0) for c in topology.consumers], dtype=float)
    if np.any(flows < 0):
        raise ValueError("station mass flows must be >= 0")
    per_run = flow_incidence(topology) @ flows
    run_flows = {run.id: float(m) for run, m in zip(topology.runs, per_run)}
    m_n = float(sum(run_flows[run.id] for run in topology.outgoing_runs(topology.root)))
    return run_flows, m_n


def split_constant_flow(m_total, demand_flows):
    """Share a fixed pump flow across consumers in proportion to their demand-driven flows."""
    demand_flows = np.asarray(demand_flows, dtype=float)
    total = demand_flows.sum()
    if total <= 0.0:
        return np.full(demand_flows.shape, m_total / demand_flows.size)
    return m_total * demand_flows / total
