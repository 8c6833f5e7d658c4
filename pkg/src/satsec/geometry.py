"""Spherical-shell geometry for the serving link and eavesdropper constellation.

Distances are kilometers and angles radians throughout. The Earth is a
sphere of radius ``r_km``; the legitimate transmitter sits on its surface,
eavesdroppers on a concentric shell of altitude ``a_e``, and the serving
satellite at altitude ``a_s`` seen under elevation ``theta_s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

EARTH_RADIUS_KM = 6378.0


def max_polar_angle(a_e: float, r: float = EARTH_RADIUS_KM) -> float:
    """Polar angle of the visibility horizon, acos(r / (r + a_e))."""
    _check_altitude(a_e)
    return math.acos(r / (r + a_e))


def beam_threshold_polar_angle(a_e: float, beam_half_angle: float,
                               r: float = EARTH_RADIUS_KM) -> float:
    """Polar angle below which a shell satellite falls inside the main lobe.

    Solves the beam cone against the shell; once sin(beam_half_angle)
    exceeds r / (r + a_e) the cone clears the shell and the threshold
    saturates at the visibility horizon.
    """
    _check_altitude(a_e)
    if not 0.0 <= beam_half_angle <= math.pi / 2:
        raise ValueError(f"beam half-angle must be in [0, pi/2], got {beam_half_angle}")
    ratio = r / (r + a_e)
    s = math.sin(beam_half_angle)
    if s > ratio:
        return max_polar_angle(a_e, r)
    return math.asin(s / ratio) - beam_half_angle


def serving_distance(a_s: float, theta_s: float, r: float = EARTH_RADIUS_KM) -> float:
    """Slant range to the serving satellite at elevation theta_s."""
    _check_altitude(a_s)
    if not 0.0 <= theta_s <= math.pi / 2:
        raise ValueError(f"elevation must be in [0, pi/2], got {theta_s}")
    rs = r * math.sin(theta_s)
    return math.sqrt(rs * rs + a_s * a_s + 2.0 * r * a_s) - rs


def chord_distance(a_e: float, psi: ArrayLike, r: float = EARTH_RADIUS_KM) -> NDArray[np.float64]:
    """Chord length from the transmitter to a shell point at polar angle psi."""
    _check_altitude(a_e)
    psi_a = np.asarray(psi, dtype=np.float64)
    re = r + a_e
    return np.sqrt(r * r + re * re - 2.0 * r * re * np.cos(psi_a))


def min_full_steer_angle(a_e: float, omega_th: float, r: float = EARTH_RADIUS_KM) -> float:
    """Smallest steering offset that saturates the main lobe at the horizon."""
    _check_altitude(a_e)
    if not 0.0 <= omega_th < math.pi / 2:
        raise ValueError(f"omega_th must be in [0, pi/2), got {omega_th}")
    return math.asin(r / (r + a_e)) - omega_th


def cap_surface_areas(a_e: float, psi_th: float,
                      r: float = EARTH_RADIUS_KM) -> tuple[float, float, float]:
    """(main-lobe, side-lobe, visible-total) shell areas in km^2."""
    _check_altitude(a_e)
    psi_max = max_polar_angle(a_e, r)
    if not 0.0 <= psi_th <= psi_max + 1e-12:
        raise ValueError(f"psi_th must be in [0, psi_max], got {psi_th}")
    re = r + a_e
    s_ml = 2.0 * math.pi * re * re * (1.0 - math.cos(min(psi_th, psi_max)))
    s_total = 2.0 * math.pi * re * a_e
    # Rounding in 1 - cos(psi_max) can leave the side cap a hair negative.
    return s_ml, max(s_total - s_ml, 0.0), s_total


@dataclass(frozen=True)
class ServingGeometry:
    """Serving-satellite placement: altitude, elevation, derived slant range."""

    altitude_km: float
    elevation_rad: float
    distance_km: float

    @classmethod
    def from_elevation(cls, a_s: float, theta_s: float,
                       r: float = EARTH_RADIUS_KM) -> "ServingGeometry":
        return cls(a_s, theta_s, serving_distance(a_s, theta_s, r))


@dataclass(frozen=True)
class EavesdropperLayer:
    """One eavesdropper shell: count, altitude, and derived beam geometry.

    ``beam_half_angle_rad`` is the effective half-angle after any steering
    offset has been applied and clamped to pi/2.
    """

    count: int
    altitude_km: float
    beam_half_angle_rad: float
    psi_max: float
    psi_th: float
    d_th_km: float
    d_max_km: float

    @classmethod
    def build(cls, count: int, altitude_km: float, beam_half_angle_rad: float,
              r: float = EARTH_RADIUS_KM) -> "EavesdropperLayer":
        if count < 0:
            raise ValueError(f"satellite count must be >= 0, got {count}")
        psi_max = max_polar_angle(altitude_km, r)
        half = min(beam_half_angle_rad, math.pi / 2)
        psi_th = beam_threshold_polar_angle(altitude_km, half, r)
        d_th = float(chord_distance(altitude_km, psi_th, r))
        d_max = math.sqrt(altitude_km * (2.0 * r + altitude_km))
        return cls(count, altitude_km, half, psi_max, psi_th, d_th, d_max)

    @property
    def degenerate_mainlobe(self) -> bool:
        """Main lobe has zero shell measure (zero beam half-angle)."""
        return self.psi_th <= 0.0

    @property
    def degenerate_sidelobe(self) -> bool:
        """Side lobe has zero shell measure (main lobe reaches the horizon)."""
        return self.psi_th >= self.psi_max - 1e-15


def _check_altitude(a: float) -> None:
    if a <= 0.0:
        raise ValueError(f"altitude must be > 0 km, got {a}")
