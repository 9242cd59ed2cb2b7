# runner.py
# Time loop: fixed-step or adaptive integration between output boundaries,
# sampled controller hook and trajectory collection.

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import psutil

from ..errors import StepSizeUnderflowError
from .integrators import error_norm, get_integrator

logger = logging.getLogger(__name__)

MIN_STEP = 1e-6  # s, adaptive lower bound
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


class ODESystem:
    """Bare right-hand side with state names; no controller, no derived outputs."""

    def __init__(self, rhs, names):
        self.rhs = rhs
        self.state_names = list(names)
        self.derived_names = []

    def sample(self, t, y, dt):
        pass

    def outputs(self, t, y):
        return {}


@dataclass
class Trajectory:
    state_names: list
    derived_names: list
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    derived: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def record(self, t, y, outputs):
        self.times.append(float(t))
        self.states.append(np.array(y, dtype=float))
        self.derived.append([outputs[name] for name in self.derived_names])

    def __len__(self):
        return len(self.times)

    @property
    def final_state(self):
        return self.states[-1]

    def column(self, name):
        if name in self.derived_names:
            k = self.derived_names.index(name)
            return np.array([row[k] for row in self.derived], dtype=float)
        k = self.state_names.index(name)
        return np.array([y[k] for y in self.states])

    def to_frame(self):
        """``time_s``, derived outputs, then raw states, in registry order."""
        n = len(self.times)
        derived = np.array(self.derived, dtype=float).reshape(n, len(self.derived_names))
        states = np.array(self.states, dtype=float).reshape(n, len(self.state_names))
        data = np.column_stack([np.array(self.times), derived, states])
        return pd.DataFrame(data, columns=["time_s", *self.derived_names, *self.state_names])


def output_times(t0, duration, interval):
    """Output boundaries from t0 to t0 + duration; the end is always included."""
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if interval <= 0:
        raise ValueError("output interval must be > 0")
    n_full = int(math.floor(duration / interval + 1e-9))
    times = [t0 + k * interval for k in range(n_full + 1)]
    if duration - n_full * interval > 1e-9 * max(1.0, duration):
        times.append(t0 + duration)
    return times


class _Counter:
    def __init__(self, rhs):
        self.rhs = rhs
        self.calls = 0

    def __call__(self, t, y):
        self.calls += 1
        return self.rhs(t, y)


def _advance_fixed(method, f, t, y, t_end, dt, stats):
    n = max(1, math.ceil((t_end - t) / dt - 1e-9))
    h = (t_end - t) / n
    for k in range(n):
        y, _, _ = method.step(f, t + k * h, y, h)
    stats["steps"] += n
    return y


def _advance_adaptive(method, f, t, y, t_end, h, config, names, stats):
    worst = 0
    while t < t_end - 1e-12 * max(1.0, abs(t_end)):
        if h < MIN_STEP:
            raise StepSizeUnderflowError(t, h, names[worst])
        step = min(h, t_end - t)
        y_new, error, _ = method.step(f, t, y, step)
        norm, worst = error_norm(error, y, y_new, config.rtol, config.atol)
        factor = MAX_FACTOR if norm == 0.0 else min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * norm ** (-1.0 / method.order)))
        if norm <= 1.0:
            t += step
            y = y_new
            stats["steps"] += 1
            if step < h:
                # clipped at an output boundary; keep the proposal for the next interval
                continue
        else:
            stats["rejected"] += 1
        h = step * factor
    return y, h


def integrate(system, y0, t0, duration, config):
    """Integrate ``system`` and collect a snapshot at every output boundary.

    ``config`` provides ``method``, ``step``, ``output_interval``, ``rtol``
    and ``atol``. The controller hook ``system.sample`` runs at each
    boundary before the snapshot is taken, so a snapshot shows the valve
    position held over the following interval.
    """
    method = get_integrator(config.method)
    f = _Counter(system.rhs)
    stats = {"steps": 0, "rejected": 0}
    trajectory = Trajectory(list(system.state_names), list(system.derived_names))

    started = time.perf_counter()
    boundaries = output_times(t0, duration, config.output_interval)
    y = np.array(getattr(y0, "values", y0), dtype=float)
    h = config.step

    for k, t in enumerate(boundaries):
        if k > 0:
            t_prev = boundaries[k - 1]
            if method.is_adaptive:
                y, h = _advance_adaptive(method, f, t_prev, y, t, h, config, trajectory.state_names, stats)
            else:
                y = _advance_fixed(method, f, t_prev, y, t, config.step, stats)
        system.sample(t, y, config.output_interval)
        trajectory.record(t, y, system.outputs(t, y))

    stats["rhs_evals"] = f.calls
    stats["wall_time_s"] = time.perf_counter() - started
    stats["memory_mb"] = psutil.Process().memory_info().rss / 2 ** 20
    trajectory.stats = stats
    logger.info(
        "integrated %.0f s with %s: %d steps (%d rejected), %d RHS evaluations, %.2f s wall, %.1f MB",
        duration, method.name, stats["steps"], stats["rejected"], stats["rhs_evals"],
        stats["wall_time_s"], stats["memory_mb"],
    )
    return trajectory


def check_step(model, dt):
    """Warn when the fixed step exceeds half of the fastest state time constant."""
    tau = model.time_constants()
    slot = int(np.argmin(tau))
    if dt > tau[slot] / 2.0:
        logger.warning(
            "step %.3g s exceeds half the fastest time constant (%.3g s in %s); explicit integration may be unstable",
            dt, tau[slot], model.state_names[slot],
        )
        return False
    return True


def simulate(model, y0, config, duration=None, t0=0.0):
    """Run an assembled model with the stability check for fixed-step methods."""
    duration = config.duration if duration is None else duration
    if not get_integrator(config.method).is_adaptive:
        check_step(model, config.step)
    model.reset_controls()
    return integrate(model, y0, t0, duration, config)
