import math

import numpy as np
import pytest

from src.errors import StepSizeUnderflowError
from src.scenario.config import IntegratorConfig
from src.simulation.runner import ODESystem, integrate, output_times


def decay_system():
    return ODESystem(lambda t, y: -y, ["x[0]"])


class TestOutputTimes:
    def test_end_included(self):
        assert output_times(0.0, 250.0, 100.0) == pytest.approx([0.0, 100.0, 200.0, 250.0])

    def test_exact_multiple(self):
        assert output_times(10.0, 300.0, 100.0) == pytest.approx([10.0, 110.0, 210.0, 310.0])

    def test_zero_duration(self):
        assert output_times(0.0, 0.0, 60.0) == [0.0]

    def test_invalid(self):
        with pytest.raises(ValueError):
            output_times(0.0, -1.0, 60.0)
        with pytest.raises(ValueError):
            output_times(0.0, 10.0, 0.0)


class TestIntegrate:
    def test_fixed_step_snapshots(self):
        config = IntegratorConfig(method="rk4", step=0.1, output_interval=0.25)
        trajectory = integrate(decay_system(), np.array([1.0]), 0.0, 1.0, config)
        assert trajectory.times == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
        assert trajectory.final_state[0] == pytest.approx(math.exp(-1.0), abs=1e-6)
        assert trajectory.stats["steps"] == 12
        assert trajectory.stats["rhs_evals"] == 48

    def test_zero_duration_gives_initial_snapshot(self):
        config = IntegratorConfig(method="euler", step=1.0, output_interval=10.0)
        trajectory = integrate(decay_system(), np.array([2.0]), 0.0, 0.0, config)
        assert len(trajectory) == 1
        assert trajectory.final_state[0] == 2.0
        assert trajectory.stats["rhs_evals"] == 0

    def test_adaptive_meets_tolerance(self):
        config = IntegratorConfig(method="rk45", step=0.5, output_interval=1.0, rtol=1e-8, atol=1e-10)
        trajectory = integrate(decay_system(), np.array([1.0]), 0.0, 5.0, config)
        assert trajectory.final_state[0] == pytest.approx(math.exp(-5.0), rel=1e-6)
        assert trajectory.times[-1] == pytest.approx(5.0)

    def test_adaptive_underflow_names_the_slot(self):
        system = ODESystem(lambda t, y: y ** 2, ["blowup[0]"])
        config = IntegratorConfig(method="rk45", step=0.1, output_interval=0.5, rtol=1e-6, atol=1e-6)
        with pytest.raises(StepSizeUnderflowError) as info:
            integrate(system, np.array([1.0]), 0.0, 2.0, config)
        assert info.value.slot == "blowup[0]"
        assert info.value.t < 1.0

    def test_controller_sampled_at_every_boundary(self):
        samples = []

        class Probe(ODESystem):
            def sample(self, t, y, dt):
                samples.append((t, dt))

        config = IntegratorConfig(method="euler", step=1.0, output_interval=5.0)
        integrate(Probe(lambda t, y: np.zeros_like(y), ["x[0]"]), np.array([0.0]), 0.0, 12.0, config)
        assert [t for t, _ in samples] == pytest.approx([0.0, 5.0, 10.0, 12.0])
        assert all(dt == 5.0 for _, dt in samples)

    def test_frame_layout(self):
        class WithOutputs(ODESystem):
            def __init__(self):
                super().__init__(lambda t, y: -y, ["x[0]", "x[1]"])
                self.derived_names = ["total"]

            def outputs(self, t, y):
                return {"total": float(np.sum(y))}

        config = IntegratorConfig(method="rk4", step=0.1, output_interval=0.5)
        trajectory = integrate(WithOutputs(), np.array([1.0, 2.0]), 0.0, 1.0, config)
        frame = trajectory.to_frame()
        assert list(frame.columns) == ["time_s", "total", "x[0]", "x[1]"]
        assert len(frame) == 3
        assert frame["total"].iloc[0] == pytest.approx(3.0)
        assert trajectory.column("x[1]") == pytest.approx(frame["x[1]"].to_numpy())
