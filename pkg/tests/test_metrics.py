import numpy as np
import pandas as pd
import pytest

from src.errors import MetricsError
from src.scenario.metrics import (
    NOT_VALIDATED,
    VALIDATED,
    compare_trajectories,
    cvrmse,
    metrics_report,
    nmbe,
    verdict,
)


class TestMetrics:
    def test_worked_example(self):
        assert nmbe([1.0, 2.0, 3.0], [2.0, 3.0, 4.0]) == pytest.approx(-50.0)
        assert cvrmse([1.0, 2.0, 3.0], [2.0, 3.0, 4.0]) == pytest.approx(50.0)

    def test_degrees_of_freedom(self):
        assert nmbe([1.0, 2.0, 3.0], [2.0, 3.0, 4.0], p=1) == pytest.approx(-75.0)
        assert cvrmse([1.0, 2.0, 3.0], [2.0, 3.0, 4.0], p=1) == pytest.approx(100.0 * np.sqrt(1.5) / 2.0)

    def test_perfect_match(self):
        assert nmbe([4.0, 5.0], [4.0, 5.0]) == 0.0
        assert cvrmse([4.0, 5.0], [4.0, 5.0]) == 0.0

    def test_cvrmse_bounds_nmbe(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            m = rng.uniform(1.0, 10.0, 50)
            s = m + rng.normal(0.0, 1.0, 50)
            assert cvrmse(m, s) >= abs(nmbe(m, s)) - 1e-9

    def test_zero_mean(self):
        with pytest.raises(MetricsError, match="zero mean"):
            nmbe([-1.0, 1.0], [0.0, 0.0])

    def test_length_mismatch(self):
        with pytest.raises(MetricsError):
            cvrmse([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_adjustment_leaves_no_samples(self):
        with pytest.raises(MetricsError):
            nmbe([1.0, 2.0], [1.0, 2.0], p=2)


class TestVerdict:
    @pytest.mark.parametrize("n, cv, expected", [
        (5.0, 20.0, VALIDATED),
        (10.0, 30.0, VALIDATED),
        (-10.0, 30.0, VALIDATED),
        (10.1, 5.0, NOT_VALIDATED),
        (-10.1, 5.0, NOT_VALIDATED),
        (0.0, 30.1, NOT_VALIDATED),
        (3.93, 16.33, VALIDATED),
        (5.00, 16.78, VALIDATED),
        (4.54, 14.57, VALIDATED),
    ])
    def test_limits_inclusive(self, n, cv, expected):
        assert verdict(n, cv) == expected

    def test_report(self):
        report = metrics_report([1.0, 2.0, 3.0], [2.0, 3.0, 4.0], column="T_n_sup")
        assert report.verdict == NOT_VALIDATED
        assert report.to_dict() == {"column": "T_n_sup", "nmbe": pytest.approx(-50.0),
                                    "cvrmse": pytest.approx(50.0), "n": 3, "verdict": NOT_VALIDATED}


class TestCompareTrajectories:
    def test_aligns_on_time(self):
        measured = pd.DataFrame({"time_s": [0.0, 600.0, 1200.0, 1800.0], "T_n_sup": [4.0, 5.0, 6.0, 7.0]})
        simulated = pd.DataFrame({"time_s": [600.0, 1200.0, 1800.0, 2400.0], "T_n_sup": [5.0, 6.0, 7.7, 9.0]})
        (report,) = compare_trajectories(measured, simulated, ["T_n_sup"])
        assert report.n == 3
        assert report.nmbe == pytest.approx(100.0 * -0.7 / (3 * 6.0))
        assert report.verdict == VALIDATED

    def test_missing_column(self):
        frame = pd.DataFrame({"time_s": [0.0, 1.0], "a": [1.0, 2.0]})
        with pytest.raises(MetricsError, match="lacks column"):
            compare_trajectories(frame, frame, ["b"])

    def test_no_overlap(self):
        a = pd.DataFrame({"time_s": [0.0, 1.0], "x": [1.0, 2.0]})
        b = pd.DataFrame({"time_s": [5.0, 6.0], "x": [1.0, 2.0]})
        with pytest.raises(MetricsError, match="common timestamps"):
            compare_trajectories(a, b, ["x"])
