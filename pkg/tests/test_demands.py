import numpy as np
import pytest

from src.errors import DemandFormatError
from src.scenario.demands import DemandSeries, DemandSet, load_demands, sample, write_demands
from src.scenario.synthetic import generate_demands


def write_csv(tmp_path, text, name="demand.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestZeroOrderHold:
    @pytest.fixture
    def series(self):
        return DemandSeries("house1", np.array([0.0, 3600.0, 7200.0]), np.array([-100.0, -200.0, -300.0]))

    @pytest.mark.parametrize("t, expected", [
        (-1.0, 0.0),
        (0.0, -100.0),
        (1800.0, -100.0),
        (3600.0, -200.0),
        (7200.0, -300.0),
        (7200.5, 0.0),
    ])
    def test_sample(self, series, t, expected):
        assert sample(series, t) == expected

    def test_table_matches_single_series(self, series):
        other = DemandSeries("house2", np.array([1800.0, 5400.0]), np.array([50.0, 60.0]))
        table = DemandSet([series, other]).table(["house1", None, "house2"])
        for t in (-5.0, 0.0, 1000.0, 1800.0, 4000.0, 5400.0, 6000.0, 7200.0, 9000.0):
            row = table.sample(t)
            assert row[0] == sample(series, t)
            assert row[1] == 0.0
            assert row[2] == sample(other, t)
        assert table.peak() == pytest.approx([300.0, 0.0, 60.0])

    def test_unordered_series_rejected(self):
        with pytest.raises(DemandFormatError):
            DemandSeries("house1", np.array([10.0, 5.0]), np.array([1.0, 2.0]))


class TestLoad:
    def test_values_are_negated(self, tmp_path):
        path = write_csv(tmp_path, "time_s,consumer_id,q_w\n0,house1,4000\n3600,house1,-1500\n")
        demands = load_demands(path)
        assert demands["house1"].values.tolist() == [-4000.0, 1500.0]

    def test_rows_sorted_per_consumer(self, tmp_path):
        path = write_csv(tmp_path, "time_s,consumer_id,q_w\n3600,b,2\n0,a,1\n0,b,3\n")
        demands = load_demands(path)
        assert len(demands) == 2
        assert demands["b"].times.tolist() == [0.0, 3600.0]

    def test_numeric_consumer_ids_stay_strings(self, tmp_path):
        path = write_csv(tmp_path, "time_s,consumer_id,q_w\n0,007,1\n")
        assert "007" in load_demands(path)

    def test_shipped_file(self):
        from pathlib import Path

        demands = load_demands(Path(__file__).resolve().parent.parent / "data" / "demands" / "minimal.csv")
        assert demands["house1"].values[0] == pytest.approx(-3741.2)
        assert len(demands["house1"].times) == 25

    def test_missing_column(self, tmp_path):
        path = write_csv(tmp_path, "time,consumer_id,q_w\n0,a,1\n")
        with pytest.raises(DemandFormatError, match="missing column"):
            load_demands(path)

    def test_bad_number_reports_line(self, tmp_path):
        path = write_csv(tmp_path, "time_s,consumer_id,q_w\n0,a,1\n3600,a,lots\n")
        with pytest.raises(DemandFormatError, match="line 3: q_w"):
            load_demands(path)

    def test_duplicate_timestamp(self, tmp_path):
        path = write_csv(tmp_path, "time_s,consumer_id,q_w\n0,a,1\n0,a,2\n")
        with pytest.raises(DemandFormatError, match="duplicate timestamps"):
            load_demands(path)

    def test_empty_file(self, tmp_path):
        with pytest.raises(DemandFormatError):
            load_demands(write_csv(tmp_path, ""))


def test_write_then_load(tmp_path):
    frame = generate_demands(["a", "b"], 7200.0, noise=0.0)
    path = tmp_path / "generated.csv"
    write_demands(path, frame)
    demands = load_demands(path)
    assert sorted(demands.series) == ["a", "b"]
    assert demands["a"].values == pytest.approx(-frame[frame["consumer_id"] == "a"]["q_w"].to_numpy(), rel=1e-5)
