# geometry.py
# Static geometry of pipes and of the soil layers around a supply/return pair.
#
# r_b is HALF the centre-to-centre distance of the supply and return pipe:
# the intersection chord of two equal layers sits at distance r_b from
# each pipe centre, so a layer of radius r overlaps its partner by a
# circular segment of height z = max(r - r_b, 0).

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PipeGeometry:
    inner_radius: float
    wall_thickness: float
    length: float

    def __post_init__(self):
        # fields may be arrays when one object describes a bundle of segments
        if np.any(np.asarray(self.inner_radius) <= 0) or np.any(np.asarray(self.wall_thickness) <= 0) \
                or np.any(np.asarray(self.length) <= 0):
            raise ValueError("pipe radius, wall thickness and length must be > 0")

    @property
    def outer_radius(self):
        return self.inner_radius + self.wall_thickness


@dataclass(frozen=True)
class PipeQuantities:
    A_f: float
    V_f: float
    m_f: float
    A_p: float
    V_p: float
    m_p: float


def pipe_geometry(g, rho_f, rho_p):
    """Cylinder / hollow-cylinder quantities of one pipe volume."""
    r, d, l = g.inner_radius, g.wall_thickness, g.length
    A_f = np.pi * r ** 2
    V_f = A_f * l
    V_p = np.pi * ((r + d) ** 2 - r ** 2) * l
    return PipeQuantities(
        A_f=A_f,
        V_f=V_f,
        m_f=rho_f * V_f,
        A_p=2.0 * np.pi * r * l,
        V_p=V_p,
        m_p=rho_p * V_p,
    )


def chord_length(r, z):
    return 2.0 * np.sqrt(np.maximum(2.0 * r * z - z ** 2, 0.0))


def _half_angle(r, chord):
    # arcsin(l / 2r), clamped against rounding at z = 0 and z = r
    return np.arcsin(np.clip(chord / (2.0 * r), -1.0, 1.0))


def lens_area(r, z):
    """Circular-segment area of a circle of radius r cut at height z."""
    chord = chord_length(r, z)
    area = r ** 2 * _half_angle(r, chord) - chord * (r - z) / 2.0
    return float(area) if np.ndim(area) == 0 else area


@dataclass(frozen=True)
class SoilLayerProfile:
    """Soil layers around one pipe of a supply/return pair.

    Arrays indexed 0..n_s (``radius``, ``height``, ``chord``, ``arc``,
    ``lens``) include the pipe's outer surface at index 0. Per-layer arrays
    (``A_h``, ``A_o``, ``A_a``, ``k_o``, ``k_a``, ``V_o``, ``V_a``) have n_s
    entries for layers 1..n_s.
    """

    n_layers: int
    thickness: float
    half_distance: float
    length: float
    beta: float  # radians
    radius: np.ndarray
    height: np.ndarray
    chord: np.ndarray
    arc: np.ndarray
    lens: np.ndarray
    A_h: np.ndarray
    A_o: np.ndarray
    A_a: np.ndarray
    k_o: np.ndarray
    k_a: np.ndarray
    V_o: np.ndarray
    V_a: np.ndarray

    @property
    def beta_degrees(self):
        return float(np.degrees(self.beta))


def soil_layer_profile(g, n_layers, thickness, half_distance):
    if n_layers < 1:
        raise ValueError("at least one soil layer is required")
    if thickness <= 0 or half_distance <= 0:
        raise ValueError("soil layer thickness and half distance must be > 0")
    if half_distance <= g.outer_radius:
        raise ValueError(
            f"half distance {half_distance} m must exceed the pipe outer radius "
            f"{g.outer_radius} m (pipes would overlap)"
        )

    i = np.arange(n_layers + 1)
    radius = g.outer_radius + i * thickness
    height = np.maximum(radius - half_distance, 0.0)
    chord = chord_length(radius, height)
    arc = 2.0 * radius * _half_angle(radius, chord)
    lens = lens_area(radius, height)
    beta = float(2.0 * _half_angle(radius[-1], chord[-1]))

    A_h = np.pi * (radius[1:] ** 2 - radius[:-1] ** 2)
    A_o = A_h * (2.0 * np.pi - beta) / (2.0 * np.pi)
    # sector of angle beta minus the growth of the overlapping segment
    A_a = (radius[1:] ** 2 - radius[:-1] ** 2) * beta / 2.0 - np.diff(lens)
    A_a = np.maximum(A_a, 0.0)

    return SoilLayerProfile(
        n_layers=n_layers,
        thickness=thickness,
        half_distance=half_distance,
        length=g.length,
        beta=beta,
        radius=radius,
        height=height,
        chord=chord,
        arc=arc,
        lens=lens,
        A_h=A_h,
        A_o=A_o,
        A_a=A_a,
        k_o=A_o / A_h,
        k_a=A_a / A_h,
        V_o=A_o * g.length,
        V_a=A_a * g.length,
    )
