import numpy as np
import pytest

from src.network.geometry import PipeGeometry, lens_area, pipe_geometry, soil_layer_profile


class TestPipeGeometry:
    def test_quantities(self):
        q = pipe_geometry(PipeGeometry(0.05, 0.01, 2.0), rho_f=1000.0, rho_p=950.0)
        assert q.A_f == pytest.approx(np.pi * 0.0025)
        assert q.V_f == pytest.approx(np.pi * 0.0025 * 2.0)
        assert q.m_f == pytest.approx(1000.0 * np.pi * 0.0025 * 2.0)
        assert q.V_p == pytest.approx(np.pi * (0.06 ** 2 - 0.05 ** 2) * 2.0)
        assert q.m_p == pytest.approx(950.0 * q.V_p)
        assert q.A_p == pytest.approx(2.0 * np.pi * 0.05 * 2.0)

    def test_non_positive_dimensions_rejected(self):
        with pytest.raises(ValueError):
            PipeGeometry(0.05, 0.0, 1.0)
        with pytest.raises(ValueError):
            PipeGeometry(np.array([0.05, -0.05]), 0.01, 1.0)


class TestLensArea:
    def test_no_intersection(self):
        assert lens_area(0.3, 0.0) == 0.0

    def test_half_circle(self):
        assert lens_area(0.3, 0.3) == pytest.approx(np.pi * 0.09 / 2.0)

    def test_worked_segment(self):
        # chord 0.8 m, half angle arcsin(0.8)
        assert lens_area(0.5, 0.2) == pytest.approx(0.11183, rel=1e-4)

    def test_array(self):
        areas = lens_area(np.array([0.3, 0.3]), np.array([0.0, 0.3]))
        assert areas == pytest.approx([0.0, np.pi * 0.09 / 2.0])


class TestSoilLayerProfile:
    @pytest.fixture
    def profile(self):
        return soil_layer_profile(PipeGeometry(0.0514, 0.0093, 25.0), 2, 0.1, 0.2)

    def test_radii(self, profile):
        assert profile.radius == pytest.approx([0.0607, 0.1607, 0.2607])

    def test_first_layer_does_not_intersect(self, profile):
        assert profile.height[1] == 0.0
        assert profile.height[2] == pytest.approx(0.0607)

    def test_chord_of_intersecting_layer(self):
        profile = soil_layer_profile(PipeGeometry(0.09, 0.01, 1.0), 2, 0.2, 0.3)
        assert profile.radius == pytest.approx([0.1, 0.3, 0.5])
        assert profile.height == pytest.approx([0.0, 0.0, 0.2], abs=1e-9)
        assert profile.chord == pytest.approx([0.0, 0.0, 0.8], abs=1e-6)

    def test_sections_partition_each_layer(self, profile):
        assert profile.k_o + profile.k_a < 1.0 + 1e-12
        assert np.all(profile.V_o > 0.0)
        assert np.all(profile.V_a > 0.0)

    def test_no_intersection_gives_zero_angle(self):
        profile = soil_layer_profile(PipeGeometry(0.0514, 0.0093, 25.0), 2, 0.1, 0.5)
        assert profile.beta == 0.0
        assert np.all(profile.A_a == 0.0)
        assert profile.k_o == pytest.approx([1.0, 1.0])

    def test_overlapping_pipes_rejected(self):
        with pytest.raises(ValueError, match="overlap"):
            soil_layer_profile(PipeGeometry(0.0514, 0.0093, 25.0), 2, 0.1, 0.05)

    def test_area_closure_on_random_profiles(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            r = rng.uniform(0.01, 0.2)
            g = PipeGeometry(r, rng.uniform(0.002, 0.03), rng.uniform(1.0, 50.0))
            n = int(rng.integers(1, 8))
            thickness = rng.uniform(0.02, 0.3)
            half_distance = rng.uniform(g.outer_radius * 1.01, g.outer_radius + n * thickness * 1.5)
            p = soil_layer_profile(g, n, thickness, half_distance)
            closure = p.A_o + p.A_a + np.diff(p.lens)
            assert closure == pytest.approx(p.A_h, rel=1e-9)
