"""Exceptions raised by the simulator."""


class SimulatorError(Exception):
    """Base class for all simulator errors."""


class ScenarioValidationError(SimulatorError):
    """Scenario failed validation; ``errors`` lists every problem as ``field.path: message``."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.errors))


class TopologyError(SimulatorError):
    """Network graph is not a tree rooted at the plant."""


class DemandFormatError(SimulatorError):
    """Demand CSV is malformed."""


class NonFiniteDerivativeError(SimulatorError):
    def __init__(self, slot, t):
        self.slot = slot
        self.t = t
        super().__init__(f"non-finite derivative in '{slot}' at t={t:.1f} s")


class StepSizeUnderflowError(SimulatorError):
    def __init__(self, t, step, slot):
        self.t = t
        self.step = step
        self.slot = slot
        super().__init__(
            f"adaptive step underflow at t={t:.3f} s (h={step:.3e} s), "
            f"largest error in '{slot}'"
        )


class MetricsError(SimulatorError):
    """Metric inputs are unusable (length mismatch, zero mean, ...)."""
