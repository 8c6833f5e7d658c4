"""Binomial point process statistics for one eavesdropper shell.

A layer holds N satellites placed uniformly on the sphere of radius
r + a_e. The shell splits into three regions relative to the terminal:
main lobe (polar angle <= psi_th), side lobe (psi_th < angle <= psi_max),
and the invisible remainder. (p, q) counts in (main, side) follow a
multinomial law; conditioned chord distances follow truncated quadratic
laws on [a_e, d_th] and [d_th, d_max].
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from satsec.geometry import EARTH_RADIUS_KM, EavesdropperLayer


def region_probabilities(layer: EavesdropperLayer,
                         r: float = EARTH_RADIUS_KM) -> tuple[float, float, float]:
    """Single-satellite probabilities (s1, s2, s3) of main lobe, side lobe, remainder."""
    a_e = layer.altitude_km
    re = r + a_e
    s1 = 0.5 * (1.0 - math.cos(layer.psi_th))
    s2 = (re * math.cos(layer.psi_th) - r) / (2.0 * re)
    s3 = 1.0 - a_e / (2.0 * re)
    return max(s1, 0.0), max(s2, 0.0), s3


def case_probability(p: int, q: int, layer: EavesdropperLayer,
                     r: float = EARTH_RADIUS_KM) -> float:
    """Multinomial probability of exactly (p, q) satellites in (main, side) lobes."""
    n = layer.count
    if p < 0 or q < 0 or p + q > n:
        raise ValueError(f"require p, q >= 0 and p + q <= N = {n}, got ({p}, {q})")
    s1, s2, s3 = region_probabilities(layer, r)
    log_coef = (math.lgamma(n + 1) - math.lgamma(p + 1) - math.lgamma(q + 1)
                - math.lgamma(n - p - q + 1))
    log_prob = log_coef
    for count, s in ((p, s1), (q, s2), (n - p - q, s3)):
        if count > 0:
            if s == 0.0:
                return 0.0
            log_prob += count * math.log(s)
    return math.exp(log_prob)


def four_case_probabilities(layer: EavesdropperLayer,
                            r: float = EARTH_RADIUS_KM) -> tuple[float, float, float, float]:
    """Probabilities of the four lobe-occupancy cases.

    Case 1: no effective satellite. Case 2: side lobe only. Case 3: main
    lobe only. Case 4: both lobes occupied. Closed forms follow from the
    multinomial marginals.
    """
    n = layer.count
    s1, s2, s3 = region_probabilities(layer, r)
    p1 = s3 ** n
    p2 = (s2 + s3) ** n - p1
    p3 = (s1 + s3) ** n - p1
    p4 = 1.0 - p1 - p2 - p3
    return p1, p2, max(p3, 0.0), max(p4, 0.0)


def distance_cdf_shell(x: ArrayLike, a_e: float,
                       r: float = EARTH_RADIUS_KM) -> NDArray[np.float64]:
    """Unconditioned chord-distance CDF of one shell satellite.

    (x^2 - a_e^2) / (4 r (r + a_e)) on [a_e, 2r + a_e], clamped outside.
    """
    xa = np.asarray(x, dtype=np.float64)
    val = (xa * xa - a_e * a_e) / (4.0 * r * (r + a_e))
    return np.clip(val, 0.0, 1.0)


def mainlobe_distance_cdf(x: ArrayLike, layer: EavesdropperLayer) -> NDArray[np.float64]:
    """CDF of the chord distance conditioned on main-lobe membership."""
    return _truncated_quadratic_cdf(x, layer.altitude_km, layer.d_th_km)


def mainlobe_distance_pdf(x: ArrayLike, layer: EavesdropperLayer) -> NDArray[np.float64]:
    """PDF (1/km) of the chord distance conditioned on main-lobe membership."""
    return _truncated_quadratic_pdf(x, layer.altitude_km, layer.d_th_km)


def sidelobe_distance_cdf(x: ArrayLike, layer: EavesdropperLayer) -> NDArray[np.float64]:
    """CDF of the chord distance conditioned on side-lobe membership."""
    return _truncated_quadratic_cdf(x, layer.d_th_km, layer.d_max_km)


def sidelobe_distance_pdf(x: ArrayLike, layer: EavesdropperLayer) -> NDArray[np.float64]:
    """PDF (1/km) of the chord distance conditioned on side-lobe membership."""
    return _truncated_quadratic_pdf(x, layer.d_th_km, layer.d_max_km)


def _truncated_quadratic_cdf(x: ArrayLike, lo: float, hi: float) -> NDArray[np.float64]:
    # Degenerate support (zero-measure lobe): point mass at lo = hi.
    xa = np.asarray(x, dtype=np.float64)
    if hi - lo <= 0.0:
        return np.where(xa > lo, 1.0, 0.0)
    val = (xa * xa - lo * lo) / (hi * hi - lo * lo)
    return np.clip(val, 0.0, 1.0)


def _truncated_quadratic_pdf(x: ArrayLike, lo: float, hi: float) -> NDArray[np.float64]:
    xa = np.asarray(x, dtype=np.float64)
    if hi - lo <= 0.0:
        return np.zeros_like(xa)
    dens = 2.0 * xa / (hi * hi - lo * lo)
    return np.where((xa >= lo) & (xa <= hi), dens, 0.0)


def enumerate_case_terms(layer: EavesdropperLayer, mass_eps: float = 1e-9,
                         r: float = EARTH_RADIUS_KM) -> tuple[list[tuple[int, int, float]], float]:
    """Deterministic (p, q, probability) enumeration covering mass >= 1 - mass_eps.

    Scans p in ascending order until the binomial marginal of the main-lobe
    count covers 1 - mass_eps/10, and for each p scans q ascending until the
    conditional side-lobe binomial covers the same quota. (0, 0) is always
    included. Returns the terms and the total covered mass.
    """
    n = layer.count
    s1, s2, s3 = region_probabilities(layer, r)
    if n == 0:
        return [(0, 0, 1.0)], 1.0
    quota = 1.0 - mass_eps / 10.0
    terms: list[tuple[int, int, float]] = []
    total = 0.0
    marginal = 0.0
    s23 = 1.0 - s1
    for p in range(n + 1):
        pm = _binom_pmf(n, p, s1)
        cond = 0.0
        s2c = s2 / s23 if s23 > 0.0 else 0.0
        for q in range(n - p + 1):
            qm = _binom_pmf(n - p, q, s2c)
            prob = pm * qm
            if prob > 0.0 or (p == 0 and q == 0):
                terms.append((p, q, prob))
            total += prob
            cond += qm
            if cond >= quota and q >= 0:
                break
        marginal += pm
        if marginal >= quota:
            break
    return terms, total


def _binom_pmf(n: int, k: int, s: float) -> float:
    if s <= 0.0:
        return 1.0 if k == 0 else 0.0
    if s >= 1.0:
        return 1.0 if k == n else 0.0
    log_p = (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
             + k * math.log(s) + (n - k) * math.log1p(-s))
    return math.exp(log_p)
