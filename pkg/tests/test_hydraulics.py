import numpy as np
import pytest

from src.network.hydraulics import (
    HEATING,
    REGENERATION,
    ScheduleEntry,
    StationParams,
    ValveControl,
    ValveOverride,
    day_of_year,
    flow_incidence,
    mixing_valve,
    pi_step,
    pump_power,
    route_mass_flows,
    split_constant_flow,
    station_mass_flow,
    station_rhs,
)
from src.network.topology import NetworkTopology, PipeRun


@pytest.fixture
def station():
    return StationParams(mass=100.0, delta_T=3.0, specific_heat=3800.0)


@pytest.fixture
def branched():
    nodes = {"plant": "plant", "j1": "junction", "j2": "junction",
             **{f"house{k}": "consumer" for k in range(1, 6)}}
    runs = [
        PipeRun("main", "plant", "j1", 100.0),
        PipeRun("b1", "j1", "house1", 40.0),
        PipeRun("b2", "j1", "house2", 40.0),
        PipeRun("spur", "j1", "j2", 60.0),
        PipeRun("b3", "j2", "house3", 30.0),
        PipeRun("b4", "j2", "house4", 30.0),
        PipeRun("b5", "j2", "house5", 30.0),
    ]
    return NetworkTopology(nodes, runs)


def controller(**kwargs):
    kwargs.setdefault("schedule", [ScheduleEntry(0.0, 5.0, HEATING)])
    kwargs.setdefault("K_p", 0.1)
    kwargs.setdefault("K_i", 0.01)
    kwargs.setdefault("y", 0.5)
    return ValveControl(**kwargs)


class TestStation:
    def test_mass_flow_from_design_spread(self, station):
        assert station_mass_flow(station, 5000.0) == pytest.approx(5000.0 / 11400.0)
        assert station_mass_flow(station, -5000.0) == pytest.approx(5000.0 / 11400.0)

    def test_rhs(self, station):
        dT = station_rhs(station, 5.0, 8.0, 0.5, -2000.0)
        assert dT == pytest.approx((0.5 * 3800.0 * 3.0 - 2000.0) / (100.0 * 3800.0))

    def test_injected_heat_warms_node(self):
        params = StationParams(mass=10.0, delta_T=3.0, specific_heat=4182.0)
        assert station_rhs(params, 5.0, 5.0, 0.0, 418.2) == pytest.approx(0.01)

    def test_steady_spread_matches_design(self, station):
        Q = -5000.0
        m = station_mass_flow(station, Q)
        assert station_rhs(station, 5.0, 8.0, m, Q) == pytest.approx(0.0, abs=1e-12)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            StationParams(mass=0.0, delta_T=3.0, specific_heat=3800.0)


class TestMixingValve:
    def test_split_and_mix(self):
        split = mixing_valve(0.25, 2.0, -1.0, 5.0)
        assert split.m_is == pytest.approx(0.5)
        assert split.m_bp == pytest.approx(1.5)
        assert split.T_sup == pytest.approx(3.5)

    def test_no_flow_returns_bypass_temperature(self):
        split = mixing_valve(0.7, 0.0, -1.0, 5.0)
        assert split.m_is == 0.0
        assert split.T_sup == 5.0

    @pytest.mark.parametrize("y", [-0.01, 1.01])
    def test_position_out_of_range(self, y):
        with pytest.raises(ValueError):
            mixing_valve(y, 1.0, 0.0, 5.0)


class TestSchedule:
    def test_entries_sorted_and_wrapped(self):
        ctrl = controller(schedule=[ScheduleEntry(200.0, 12.0, REGENERATION), ScheduleEntry(10.0, 2.0, HEATING)])
        assert ctrl.active_entry(5 * 86400.0).mode == REGENERATION
        assert ctrl.active_entry(50 * 86400.0).setpoint == 2.0
        assert ctrl.active_entry(250 * 86400.0).setpoint == 12.0
        assert ctrl.mode == REGENERATION

    def test_day_of_year_wraps(self):
        assert day_of_year(0.0, 365 * 86400.0 + 3600.0) == pytest.approx(1.0 / 24.0)
        assert day_of_year(86400.0, 0.0) == pytest.approx(1.0)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            ScheduleEntry(0.0, 5.0, "cooling")

    def test_empty_schedule(self):
        with pytest.raises(ValueError):
            ValveControl(schedule=[])


class TestPIController:
    def test_first_samples(self):
        ctrl = controller()
        assert pi_step(ctrl, 4.0, 0.0, 1.0) == pytest.approx(0.51)
        assert pi_step(ctrl, 3.0, 1.0, 1.0) == pytest.approx(0.63)

    def test_regeneration_inverts_error(self):
        ctrl = controller(schedule=[ScheduleEntry(0.0, 12.0, REGENERATION)])
        assert pi_step(ctrl, 14.0, 0.0, 1.0) == pytest.approx(0.52)

    def test_output_clamped_without_windup(self):
        ctrl = controller(K_p=0.0, y=0.9)
        for k in range(50):
            pi_step(ctrl, -5.0, float(k), 1.0)
        assert ctrl.y == 1.0
        assert pi_step(ctrl, 5.5, 50.0, 1.0) == pytest.approx(0.995)

    def test_mode_switch_has_no_proportional_kick(self):
        ctrl = controller(schedule=[ScheduleEntry(0.0, 2.0, HEATING), ScheduleEntry(1.0, 12.0, REGENERATION)])
        assert pi_step(ctrl, 4.0, 0.0, 1.0) == pytest.approx(0.48)
        assert pi_step(ctrl, 14.0, 86400.0, 1.0) == pytest.approx(0.50)
        assert ctrl.mode == REGENERATION

    def test_override_holds_position(self):
        ctrl = controller(overrides=[ValveOverride(100.0, 200.0, 0.8)])
        assert pi_step(ctrl, 4.0, 150.0, 1.0) == 0.8
        assert pi_step(ctrl, 4.0, 200.0, 1.0) == pytest.approx(0.81)

    def test_non_positive_sample_time(self):
        with pytest.raises(ValueError):
            pi_step(controller(), 4.0, 0.0, 0.0)

    def test_closed_loop_settles(self):
        ctrl = controller(K_p=0.05, K_i=0.01, y=0.0)
        for k in range(400):
            pi_step(ctrl, 10.0 * ctrl.y, float(k), 1.0)
        assert abs(10.0 * ctrl.y - 5.0) < 1e-3


class TestPump:
    def test_power(self):
        assert pump_power(1e5, 2.0, 1000.0, 0.5) == pytest.approx(400.0)

    @pytest.mark.parametrize("eta", [0.0, 1.5])
    def test_efficiency_range(self, eta):
        with pytest.raises(ValueError):
            pump_power(1e5, 2.0, 1000.0, eta)


class TestRouting:
    def test_incidence(self, branched):
        matrix = flow_incidence(branched)
        assert matrix.shape == (7, 5)
        assert matrix[0].sum() == 5.0
        assert matrix[3].tolist() == [0.0, 0.0, 1.0, 1.0, 1.0]

    def test_flows_add_up_towards_the_plant(self, branched):
        station_flows = {f"house{k}": 0.1 * k for k in range(1, 6)}
        run_flows, m_n = route_mass_flows(branched, station_flows)
        assert m_n == pytest.approx(1.5)
        assert run_flows["main"] == pytest.approx(1.5)
        assert run_flows["spur"] == pytest.approx(1.2)
        assert run_flows["b1"] == pytest.approx(0.1)

    def test_missing_station_carries_no_flow(self, branched):
        run_flows, m_n = route_mass_flows(branched, {"house1": 0.3})
        assert run_flows["spur"] == 0.0
        assert m_n == pytest.approx(0.3)

    def test_negative_flow_rejected(self, branched):
        with pytest.raises(ValueError):
            route_mass_flows(branched, {"house1": -0.1})

    def test_constant_flow_split(self):
        assert split_constant_flow(3.0, [1.0, 2.0, 0.0]) == pytest.approx([1.0, 2.0, 0.0])
        assert split_constant_flow(3.0, np.zeros(3)) == pytest.approx([1.0, 1.0, 1.0])
