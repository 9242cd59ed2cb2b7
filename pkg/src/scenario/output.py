# output.py
# Trajectory CSV and metrics report files.

import json
import logging

import pandas as pd

logger = logging.getLogger(__name__)


def write_trajectory(trajectory, path):
    """CSV with ``time_s``, the derived outputs, then every state, in a fixed order."""
    frame = trajectory.to_frame()
    frame.to_csv(path, index=False)
    logger.info("wrote %d snapshots x %d columns to %s", len(frame), frame.shape[1], path)
    return frame


def read_trajectory(path):
    return pd.read_csv(path)


def format_reports(reports):
    """Fixed-width table of metrics reports for the terminal."""
    header = f"{'column':<24}{'n':>8}{'NMBE %':>12}{'CVRMSE %':>12}  verdict"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(f"{r.column:<24}{r.n:>8d}{r.nmbe:>12.3f}{r.cvrmse:>12.3f}  {r.verdict}")
    return "\n".join(lines)


def write_reports(reports, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump([r.to_dict() for r in reports], f, indent=2)
    logger.info("wrote metrics report to %s", path)
