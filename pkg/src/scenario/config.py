# config.py
# Scenario schema (pydantic) and loader.
#
# A scenario is one JSON file. Every problem found while loading is
# reported at once as "field.path: message".

import json
import logging
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..errors import ScenarioValidationError, TopologyError
from ..network.topology import NetworkTopology, PipeRun

logger = logging.getLogger(__name__)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


# ==================== MATERIALS ====================

class FluidConfig(_Strict):
    density: float = Field(gt=0)
    specific_heat: float = Field(gt=0)
    viscosity_table: List[Tuple[float, float]] = Field(min_length=2)
    """(temperature °C, dynamic viscosity Pa·s), strictly increasing in temperature."""

    @model_validator(mode="after")
    def _table_ordered(self):
        temps = [t for t, _ in self.viscosity_table]
        if any(b <= a for a, b in zip(temps, temps[1:])):
            raise ValueError("viscosity_table temperatures must be strictly increasing")
        if any(mu <= 0 for _, mu in self.viscosity_table):
            raise ValueError("viscosity_table viscosities must be > 0")
        return self


class WaterConfig(_Strict):
    c_w: float = Field(4182.0, gt=0)
    c_ice: float = Field(2100.0, gt=0)
    dh_fus: float = Field(333550.0, gt=0)
    """Fusion enthalpy spread over the 1 K band between T_solid and T_fluid."""
    conductivity: float = Field(0.6, gt=0)
    density: float = Field(1000.0, gt=0)
    T_fluid: float = 0.0
    T_solid: float = -1.0

    @model_validator(mode="after")
    def _ordering(self):
        if not self.dh_fus > self.c_w > self.c_ice:
            raise ValueError("water constants must satisfy dh_fus > c_w > c_ice")
        if self.T_solid >= self.T_fluid:
            raise ValueError("T_solid must be below T_fluid")
        return self


class SoilConfig(_Strict):
    density: float = Field(gt=0)
    dry_specific_heat: float = Field(gt=0)
    conductivity: float = Field(gt=0)
    water_share: float = Field(ge=0, le=1)


class ClimateConfig(_Strict):
    T_min: float
    T_max: float
    t0: float = Field(0.0, ge=0)
    """Seconds since 1 January 00:00 at simulation start."""

    @model_validator(mode="after")
    def _range(self):
        if self.T_min > self.T_max:
            raise ValueError("T_min must not exceed T_max")
        return self


class PipeMaterialConfig(_Strict):
    density: float = Field(gt=0)
    specific_heat: float = Field(gt=0)
    conductivity: float = Field(gt=0)
    alpha: float = Field(gt=0)
    """Fluid to wall heat transfer coefficient, W/(m²·K)."""


# ==================== NETWORK ====================

class StationConfig(_Strict):
    mass: float = Field(gt=0)
    delta_T: float = Field(gt=0)


class NodeConfig(_Strict):
    id: str = Field(min_length=1)
    kind: Literal["plant", "junction", "consumer"]
    station: Optional[StationConfig] = None
    """Consumer-specific station; falls back to the scenario-wide ``station``."""


class PipeConfig(_Strict):
    id: str = Field(min_length=1)
    parent: str = Field(alias="from")
    child: str = Field(alias="to")
    length: float = Field(gt=0)
    inner_radius: float = Field(gt=0)
    wall_thickness: float = Field(gt=0)
    half_distance: float = Field(gt=0)
    """HALF the centre distance between supply and return pipe."""
    section_distance: Optional[float] = Field(None, gt=0)
    pair_distance: Optional[float] = Field(None, gt=0)
    material: Optional[PipeMaterialConfig] = None

    @model_validator(mode="after")
    def _no_overlap(self):
        if self.half_distance <= self.inner_radius + self.wall_thickness:
            raise ValueError("half_distance must exceed the pipe outer radius (pipes would overlap)")
        return self


class NetworkConfig(_Strict):
    segment_length: float = Field(25.0, gt=0)
    soil_layers: int = Field(ge=1)
    soil_thickness: float = Field(gt=0)
    boundary_on_adjacent: bool = True
    nodes: List[NodeConfig] = Field(min_length=2)
    pipes: List[PipeConfig] = Field(min_length=1)


# ==================== PLANT ====================

class StorageConfig(_Strict):
    water_radius: float = Field(gt=0)
    water_volume: float = Field(gt=0)
    n_layers: int = Field(ge=2)
    n_coils: int = Field(ge=1)
    coil_inner_radius: float = Field(gt=0)
    coil_thickness: float = Field(gt=0)
    coil_length: float = Field(gt=0)
    concrete_thickness: float = Field(gt=0)
    concrete_density: float = Field(gt=0)
    concrete_specific_heat: float = Field(gt=0)
    concrete_conductivity: float = Field(gt=0)
    soil_layers: int = Field(ge=1)
    soil_thickness: float = Field(gt=0)
    alpha_fluid_coil: float = Field(gt=0)
    alpha_coil_water: float = Field(gt=0)
    alpha_water_concrete: float = Field(gt=0)
    ice_conductivity: float = Field(2.2, gt=0)
    coil_conductivity: float = Field(gt=0)
    end_layer_coupling: Literal["parallel", "series"] = "parallel"
    inlet_at_bottom: bool = True
    initial_temperature: float = 4.0


class PumpConfig(_Strict):
    efficiency: float = Field(0.5, gt=0, le=1)
    constant_mass_flow: Optional[float] = Field(None, ge=0)


class ScheduleEntryConfig(_Strict):
    day: float = Field(ge=0, lt=366)
    setpoint: float
    mode: Literal["heating", "regeneration"] = "heating"


class OverrideConfig(_Strict):
    start_s: float = Field(ge=0)
    end_s: float = Field(gt=0)
    position: float = Field(ge=0, le=1)

    @model_validator(mode="after")
    def _window(self):
        if self.end_s <= self.start_s:
            raise ValueError("override end_s must be after start_s")
        return self


class ControllerConfig(_Strict):
    K_p: float = Field(0.05, ge=0)
    K_i: float = Field(1e-4, ge=0)
    initial_position: float = Field(0.5, ge=0, le=1)
    schedule: List[ScheduleEntryConfig] = Field(min_length=1)
    overrides: List[OverrideConfig] = Field(default_factory=list)


class IntegratorConfig(_Strict):
    method: Literal["euler", "explicit-euler", "rk4", "rk45", "adaptive-rk45"] = "rk4"
    step: float = Field(60.0, gt=0)
    output_interval: float = Field(60.0, gt=0)
    rtol: float = Field(1e-6, gt=0)
    atol: float = Field(1e-4, gt=0)
    duration: float = Field(86400.0, ge=0)


class DemandConfig(_Strict):
    bindings: Dict[str, str] = Field(default_factory=dict)
    """consumer node id -> ``consumer_id`` series in the demand CSV; unbound consumers use their own id."""


class InitialConfig(_Strict):
    network_temperature: Optional[float] = None
    soil_layers: Optional[List[float]] = None
    """Per-layer start temperature of the network soil, innermost first."""
    station_temperature: Optional[float] = None


class Scenario(_Strict):
    name: str = "scenario"
    fluid: FluidConfig
    water: WaterConfig = Field(default_factory=WaterConfig)
    soil: SoilConfig
    climate: ClimateConfig
    pipe_material: PipeMaterialConfig
    network: NetworkConfig
    storage: StorageConfig
    station: StationConfig
    pump: PumpConfig = Field(default_factory=PumpConfig)
    controller: ControllerConfig
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    demands: DemandConfig = Field(default_factory=DemandConfig)
    initial: InitialConfig = Field(default_factory=InitialConfig)

    def topology(self):
        nodes = {n.id: n.kind for n in self.network.nodes}
        runs = [PipeRun(p.id, p.parent, p.child, p.length) for p in self.network.pipes]
        return NetworkTopology(nodes, runs)

    def consumer_ids(self):
        return [n.id for n in self.network.nodes if n.kind == "consumer"]

    def series_for(self, consumer):
        return self.demands.bindings.get(consumer, consumer)


# ==================== LOADING ====================

def _format_loc(loc):
    return ".".join(str(part) for part in loc) or "<root>"


def _semantic_errors(sc):
    errors = []

    ids = [n.id for n in sc.network.nodes]
    for dup in sorted({i for i in ids if ids.count(i) > 1}):
        errors.append(f"network.nodes: duplicate node id {dup!r}")
    pipe_ids = [p.id for p in sc.network.pipes]
    for dup in sorted({i for i in pipe_ids if pipe_ids.count(i) > 1}):
        errors.append(f"network.pipes: duplicate pipe id {dup!r}")

    for k, node in enumerate(sc.network.nodes):
        if node.station is not None and node.kind != "consumer":
            errors.append(f"network.nodes.{k}.station: only consumers carry a station")

    if not errors:
        try:
            sc.topology()
        except TopologyError as exc:
            errors.append(f"network: {exc}")

    consumers = set(sc.consumer_ids())
    for consumer in sc.demands.bindings:
        if consumer not in consumers:
            errors.append(f"demands.bindings.{consumer}: no consumer node with this id")

    layers = sc.initial.soil_layers
    if layers is not None and len(layers) != sc.network.soil_layers:
        errors.append(
            f"initial.soil_layers: expected {sc.network.soil_layers} values, got {len(layers)}"
        )

    for k, override in enumerate(sc.controller.overrides):
        if sc.integrator.duration and override.start_s > sc.integrator.duration:
            logger.warning("controller.overrides.%d starts after the end of the run", k)

    return errors


def validate_scenario(raw):
    """Validate a parsed JSON document; returns a Scenario or raises with every error found."""
    try:
        sc = Scenario.model_validate(raw)
    except ValidationError as exc:
        errors = [f"{_format_loc(err['loc'])}: {err['msg']}" for err in exc.errors()]
        raise ScenarioValidationError(errors) from None

    errors = _semantic_errors(sc)
    if errors:
        raise ScenarioValidationError(errors)
    return sc


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw, assignments):
    """Patch ``dotted.path=value`` assignments into a parsed scenario document."""
    errors = []
    for assignment in assignments:
        path, sep, value = assignment.partition("=")
        if not sep or not path:
            errors.append(f"{assignment}: expected dotted.path=value")
            continue
        keys = path.split(".")
        node = raw
        try:
            for key in keys[:-1]:
                node = node[int(key)] if isinstance(node, list) else node.setdefault(key, {})
            last = keys[-1]
            if isinstance(node, list):
                node[int(last)] = _parse_value(value)
            else:
                node[last] = _parse_value(value)
        except (ValueError, IndexError, KeyError, TypeError, AttributeError):
            errors.append(f"{path}: cannot apply override")
    if errors:
        raise ScenarioValidationError(errors)
    return raw


def load_scenario(path, overrides=()):
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError([f"<file>: not valid JSON ({exc.msg} at line {exc.lineno})"]) from None

    if overrides:
        raw = apply_overrides(raw, overrides)
    sc = validate_scenario(raw)
    logger.info(
        "loaded scenario %r: %d nodes, %d pipe runs",
        sc.name, len(sc.network.nodes), len(sc.network.pipes),
    )
    return sc

