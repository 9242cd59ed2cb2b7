from .config import Scenario, apply_overrides, load_scenario, validate_scenario
from .demands import DemandSeries, DemandSet, load_demands, sample, write_demands
from .metrics import MetricsReport, compare_trajectories, cvrmse, metrics_report, nmbe, verdict
from .output import read_trajectory, write_trajectory
from .synthetic import generate_demands

__all__ = [
    "DemandSeries",
    "DemandSet",
    "MetricsReport",
    "Scenario",
    "apply_overrides",
    "compare_trajectories",
    "cvrmse",
    "generate_demands",
    "load_demands",
    "load_scenario",
    "metrics_report",
    "nmbe",
    "read_trajectory",
    "sample",
    "validate_scenario",
    "verdict",
    "write_demands",
    "write_trajectory",
]
