# demands.py
# Consumer heat demand series from CSV (time_s, consumer_id, q_w).
#
# Files use the building convention: positive q_w means the network
# supplies heat to the building. Values are negated once, here, so that
# inside the simulator a positive demand injects heat into the network.

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..errors import DemandFormatError

logger = logging.getLogger(__name__)

COLUMNS = ["time_s", "consumer_id", "q_w"]


@dataclass(frozen=True)
class DemandSeries:
    series_id: str
    times: np.ndarray
    values: np.ndarray  # network convention

    def __post_init__(self):
        if len(self.times) != len(self.values) or len(self.times) == 0:
            raise DemandFormatError(f"series {self.series_id!r}: needs matching, non-empty times and values")
        if np.any(np.diff(self.times) <= 0):
            raise DemandFormatError(f"series {self.series_id!r}: timestamps must be strictly increasing")
        if not (np.all(np.isfinite(self.times)) and np.all(np.isfinite(self.values))):
            raise DemandFormatError(f"series {self.series_id!r}: non-finite sample")


def sample(series, t):
    """Zero-order hold; 0 W before the first and after the last sample."""
    if t < series.times[0] or t > series.times[-1]:
        return 0.0
    k = np.searchsorted(series.times, t, side="right") - 1
    return float(series.values[k])


class DemandSet:
    def __init__(self, series):
        self.series = {s.series_id: s for s in series}

    def __contains__(self, series_id):
        return series_id in self.series

    def __getitem__(self, series_id):
        return self.series[series_id]

    def __len__(self):
        return len(self.series)

    def table(self, series_ids):
        """Merged lookup table for a fixed list of series (None for an unbound consumer)."""
        return DemandTable([self.series.get(s) if s is not None else None for s in series_ids])


class DemandTable:
    """Fast zero-order-hold sampling of many series on one merged time axis."""

    def __init__(self, series):
        known = [s for s in series if s is not None]
        self.times = np.unique(np.concatenate([s.times for s in known])) if known else np.array([0.0])
        self.values = np.zeros((len(self.times), len(series)))
        self.first = np.full(len(series), np.inf)
        self.last = np.full(len(series), -np.inf)
        for c, s in enumerate(series):
            if s is None:
                continue
            k = np.searchsorted(s.times, self.times, side="right") - 1
            self.values[:, c] = np.where(k >= 0, s.values[np.maximum(k, 0)], 0.0)
            self.first[c] = s.times[0]
            self.last[c] = s.times[-1]

    def sample(self, t):
        k = np.searchsorted(self.times, t, side="right") - 1
        if k < 0:
            return np.zeros(self.values.shape[1])
        row = self.values[k]
        return np.where((t >= self.first) & (t <= self.last), row, 0.0)

    def peak(self):
        return np.max(np.abs(self.values), axis=0) if len(self.values) else np.zeros(self.values.shape[1])


def load_demands(path):
    try:
        df = pd.read_csv(path, dtype={"consumer_id": str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DemandFormatError(f"{path}: cannot parse demand CSV ({exc})") from None

    missing = [c for c in COLUMNS if c not in df.columns]
    if missing:
        raise DemandFormatError(f"{path}: missing column(s) {missing}; expected header {','.join(COLUMNS)}")

    for column in ("time_s", "q_w"):
        values = pd.to_numeric(df[column], errors="coerce")
        bad = values.isna() | ~np.isfinite(values.fillna(0.0))
        if bad.any():
            row = int(bad.idxmax()) + 2  # header is line 1
            raise DemandFormatError(f"{path}: line {row}: {column} is not a finite number")
        df[column] = values

    series = []
    for series_id, group in df.groupby("consumer_id", sort=True):
        group = group.sort_values("time_s", kind="stable")
        times = group["time_s"].to_numpy(dtype=float)
        if np.any(np.diff(times) <= 0):
            raise DemandFormatError(f"{path}: consumer {series_id!r} has duplicate timestamps")
        series.append(DemandSeries(str(series_id), times, -group["q_w"].to_numpy(dtype=float)))

    logger.info("loaded %d demand series from %s", len(series), path)
    return DemandSet(series)


def write_demands(path, frame):
    """Write a frame with ``time_s, consumer_id, q_w`` in file convention."""
    frame.loc[:, COLUMNS].to_csv(path, index=False, float_format="%.6g")
