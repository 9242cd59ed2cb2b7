# metrics.py
# Calibration metrics after ASHRAE Guideline 14: NMBE and CV(RMSE) with
# an optional degrees-of-freedom adjustment p, and the validation verdict.

import logging
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from ..errors import MetricsError

logger = logging.getLogger(__name__)

NMBE_LIMIT = 10.0
CVRMSE_LIMIT = 30.0

VALIDATED = "validated"
NOT_VALIDATED = "not-validated"


def _prepare(measured, simulated, p):
    m = np.asarray(measured, dtype=float)
    s = np.asarray(simulated, dtype=float)
    if m.shape != s.shape or m.ndim != 1:
        raise MetricsError(f"series must be 1-D and of equal length, got {m.shape} and {s.shape}")
    if len(m) < 2:
        raise MetricsError("at least 2 samples are required")
    if len(m) - p <= 0:
        raise MetricsError(f"degrees-of-freedom adjustment p={p} leaves no samples")
    mean = m.mean()
    if mean == 0.0:
        raise MetricsError("measured series has zero mean; normalised metrics are undefined")
    return m, s, mean


def nmbe(measured, simulated, p=0):
    m, s, mean = _prepare(measured, simulated, p)
    return float(100.0 * np.sum(m - s) / ((len(m) - p) * mean))


def cvrmse(measured, simulated, p=0):
    m, s, mean = _prepare(measured, simulated, p)
    return float(100.0 * np.sqrt(np.sum((m - s) ** 2) / (len(m) - p)) / mean)


def verdict(nmbe_value, cvrmse_value):
    """Limits are inclusive: |NMBE| <= 10 % and CVRMSE <= 30 %."""
    if abs(nmbe_value) <= NMBE_LIMIT and cvrmse_value <= CVRMSE_LIMIT:
        return VALIDATED
    return NOT_VALIDATED


@dataclass(frozen=True)
class MetricsReport:
    column: str
    nmbe: float
    cvrmse: float
    n: int
    verdict: str

    def to_dict(self):
        return asdict(self)


def metrics_report(measured, simulated, column="", p=0):
    n_value = nmbe(measured, simulated, p)
    cv_value = cvrmse(measured, simulated, p)
    return MetricsReport(column, n_value, cv_value, len(np.asarray(measured)), verdict(n_value, cv_value))


def compare_trajectories(measured, simulated, columns, p=0):
    """One report per column after aligning both frames on ``time_s`` (inner join)."""
    for label, frame in (("measured", measured), ("simulated", simulated)):
        missing = [c for c in ["time_s", *columns] if c not in frame.columns]
        if missing:
            raise MetricsError(f"{label} data lacks column(s) {missing}")

    merged = pd.merge(
        measured[["time_s", *columns]],
        simulated[["time_s", *columns]],
        on="time_s",
        suffixes=("_measured", "_simulated"),
    )
    if len(merged) < 2:
        raise MetricsError("fewer than 2 common timestamps between measured and simulated data")
    if len(merged) < min(len(measured), len(simulated)):
        logger.warning("only %d common timestamps; unmatched rows ignored", len(merged))

    return [
        metrics_report(merged[f"{c}_measured"].to_numpy(), merged[f"{c}_simulated"].to_numpy(), c, p)
        for c in columns
    ]
