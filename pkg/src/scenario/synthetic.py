# synthetic.py
# Synthetic consumer demand profiles for examples and tests.
#
# Heating dominates in winter, cooling appears in summer, both modulated
# over the day. Output follows the demand CSV convention (positive q_w:
# the network supplies heat to the building).

import logging

import numpy as np
import pandas as pd

from ..network.ground import COLDEST_HOUR, HOURS_PER_YEAR, SECONDS_PER_HOUR

logger = logging.getLogger(__name__)

HOURS_PER_DAY = 24.0
MORNING_PEAK_HOUR = 7.0
DAILY_AMPLITUDE = 0.25


def seasonal_weights(hours):
    """(heating, cooling) weights in [0, 1]; heating peaks at the coldest hour."""
    season = np.cos(2.0 * np.pi * (hours - COLDEST_HOUR) / HOURS_PER_YEAR)
    return np.maximum(season, 0.0), np.maximum(-season, 0.0)


def daily_modulation(hours):
    return 1.0 + DAILY_AMPLITUDE * np.cos(2.0 * np.pi * (hours % HOURS_PER_DAY - MORNING_PEAK_HOUR) / HOURS_PER_DAY)


def generate_demands(consumers, duration, step=3600.0, peak_heating=5000.0, peak_cooling=1500.0,
                     t0=0.0, seed=0, noise=0.05):
    """Demand frame ``time_s, consumer_id, q_w`` for every consumer.

    Each consumer gets a fixed size factor in [0.8, 1.2] drawn from the
    seeded generator; ``noise`` is the relative standard deviation of the
    sample-to-sample scatter (0 disables it).
    """
    if duration <= 0 or step <= 0:
        raise ValueError("duration and step must be > 0")
    if peak_heating < 0 or peak_cooling < 0 or noise < 0:
        raise ValueError("peaks and noise must be >= 0")
    if not consumers:
        raise ValueError("no consumers to generate demands for")

    rng = np.random.default_rng(seed)
    times = np.arange(0.0, duration + step / 2.0, step)
    hours = (t0 + times) / SECONDS_PER_HOUR
    heating, cooling = seasonal_weights(hours)
    daily = daily_modulation(hours)

    frames = []
    for consumer in consumers:
        size = rng.uniform(0.8, 1.2)
        q = size * daily * (peak_heating * heating - peak_cooling * cooling) / (1.0 + DAILY_AMPLITUDE)
        if noise > 0:
            q = q * (1.0 + noise * rng.standard_normal(len(q)))
        frames.append(pd.DataFrame({"time_s": times, "consumer_id": consumer, "q_w": q}))

    frame = pd.concat(frames, ignore_index=True)
    logger.info("generated %d demand samples for %d consumers", len(frame), len(consumers))
    return frame
