"""Shadowed-Rician fading, antenna model, and link budget.

The channel power gain h has CDF F(x) = K sum_n (m)_n delta^n (2b)^(1+n)
/ (n!)^2 gamma(1+n, x/(2b)) with K = ((2bm)/(2bm+Omega))^m / (2b) and
delta = (Omega/(2bm+Omega)) / (2b). Received SNR over distance d is
h / (w d^alpha), where w collects carrier, bandwidth, power, noise, and
antenna-gain terms. All path-loss distances are meters; the public API
takes kilometers and converts internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import gammaln

from satsec.specfun import (DEFAULT_SERIES, SeriesControl, SeriesInfo,
                            reg_lower_incomplete_gamma, sum_series)

SPEED_OF_LIGHT_M_S = 3.0e8
KM_TO_M = 1000.0


def db_to_linear(db: float) -> float:
    """Power ratio from decibels."""
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    """Watts from dBm."""
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class FadingParams:
    """Shadowed-Rician parameters: scatter power b, Nakagami order m, LOS power omega."""

    b: float
    m: float
    omega: float

    def __post_init__(self) -> None:
        if self.b <= 0.0 or self.m <= 0.0 or self.omega <= 0.0:
            raise ValueError("b, m, omega must all be > 0")

    @property
    def k_const(self) -> float:
        """Normalizing constant K = ((2bm)/(2bm+Omega))^m / (2b)."""
        tb = 2.0 * self.b
        return (tb * self.m / (tb * self.m + self.omega)) ** self.m / tb

    @property
    def delta(self) -> float:
        """Series ratio delta = (Omega/(2bm+Omega)) / (2b); 2b*delta < 1 always."""
        tb = 2.0 * self.b
        return self.omega / (tb * self.m + self.omega) / tb

    @property
    def mean_power(self) -> float:
        """E[h] = 2b + Omega."""
        return 2.0 * self.b + self.omega


AVERAGE_SHADOWING = FadingParams(b=0.126, m=10.1, omega=0.835)


def log_cdf_coeffs(fading: FadingParams, n_max: int) -> NDArray[np.float64]:
    """log of K (m)_n delta^n (2b)^(1+n) / n! for n = 0 .. n_max-1.

    These absorb the Gamma(1+n) of the regularized incomplete gamma, so the
    CDF series reads sum_n exp(coeff_n) P(1+n, x/(2b)).
    """
    n = np.arange(n_max, dtype=np.float64)
    tb = 2.0 * fading.b
    return (math.log(fading.k_const)
            + gammaln(fading.m + n) - gammaln(fading.m)
            + n * math.log(fading.delta)
            + (1.0 + n) * math.log(tb)
            - gammaln(n + 1.0))


def sr_cdf(x: ArrayLike, fading: FadingParams, ctrl: SeriesControl = DEFAULT_SERIES,
           info: SeriesInfo | None = None) -> NDArray[np.float64]:
    """CDF of the shadowed-Rician power gain, vectorized over x."""
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    scalar = np.ndim(x) == 0
    if np.any(xa < 0.0):
        raise ValueError("gain must be >= 0")
    coeffs = log_cdf_coeffs(fading, ctrl.n_max)
    z = xa / (2.0 * fading.b)

    def term(n: int) -> NDArray[np.float64]:
        return np.exp(coeffs[n]) * reg_lower_incomplete_gamma(1.0 + n, z)

    out = sum_series(term, xa.shape, ctrl, info)
    np.clip(out, 0.0, 1.0, out=out)
    return out[0] if scalar else out


def sr_pdf(x: ArrayLike, fading: FadingParams, ctrl: SeriesControl = DEFAULT_SERIES,
           info: SeriesInfo | None = None) -> NDArray[np.float64]:
    """PDF of the shadowed-Rician power gain, vectorized over x."""
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    scalar = np.ndim(x) == 0
    if np.any(xa < 0.0):
        raise ValueError("gain must be >= 0")
    tb = 2.0 * fading.b
    log_k = math.log(fading.k_const)
    log_delta = math.log(fading.delta)
    lg_m = gammaln(fading.m)
    with np.errstate(divide="ignore"):
        log_x = np.where(xa > 0.0, np.log(xa), -np.inf)

    def term(n: int) -> NDArray[np.float64]:
        log_c = (log_k + gammaln(fading.m + n) - lg_m + n * log_delta
                 - 2.0 * gammaln(n + 1.0))
        if n == 0:
            return np.exp(log_c - xa / tb)
        return np.exp(log_c + n * log_x - xa / tb)

    out = sum_series(term, xa.shape, ctrl, info)
    return out[0] if scalar else out


def sr_sample(fading: FadingParams, rng: np.random.Generator,
              size: int) -> NDArray[np.float64]:
    """Draw shadowed-Rician power gains: |X + xi|^2 + Y^2 with gamma-distributed LOS power.

    Draw order is fixed (gamma, normal, normal) so identical generator states
    yield identical samples.
    """
    los = rng.gamma(shape=fading.m, scale=fading.omega / fading.m, size=size)
    sigma = math.sqrt(fading.b)
    x = rng.normal(0.0, sigma, size) + np.sqrt(los)
    y = rng.normal(0.0, sigma, size)
    return x * x + y * y


def antenna_gain(offset: ArrayLike, beam_half_angle: float, g_ml: float,
                 g_sl: float) -> NDArray[np.float64]:
    """Sectored receive gain: g_ml inside the half-angle, g_sl outside."""
    off = np.abs(np.asarray(offset, dtype=np.float64))
    return np.where(off <= beam_half_angle, g_ml, g_sl)


@dataclass(frozen=True)
class SystemParams:
    """Link-level constants and beam configuration."""

    r_km: float = 6378.0
    alpha: float = 2.0
    f_c_hz: float = 2.0e9
    bandwidth_hz: float = 1.0e6
    tx_power_w: float = dbm_to_watts(23.0)
    noise_psd_w_hz: float = dbm_to_watts(-174.0)
    g_t: float = 1.0
    g_r_ml: float = db_to_linear(30.0)
    g_r_sl: float = db_to_linear(10.0)
    omega_th_rad: float = math.radians(40.0)
    delta_omega_sb_rad: float = 0.0
    c_m_s: float = SPEED_OF_LIGHT_M_S

    def __post_init__(self) -> None:
        positive = ("r_km", "alpha", "f_c_hz", "bandwidth_hz", "tx_power_w",
                    "noise_psd_w_hz", "g_t", "g_r_ml", "g_r_sl", "c_m_s")
        for name in positive:
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 <= self.omega_th_rad < math.pi / 2:
            raise ValueError("omega_th_rad must be in [0, pi/2)")
        if self.delta_omega_sb_rad < 0.0:
            raise ValueError("delta_omega_sb_rad must be >= 0")


@dataclass(frozen=True)
class LinkBudget:
    """Path-loss prefactors w1 (main lobe) and w2 (side lobe), units 1/m^alpha."""

    w1: float
    w2: float

    @classmethod
    def from_system(cls, system: SystemParams) -> "LinkBudget":
        num = 16.0 * math.pi ** 2 * system.f_c_hz ** 2 * system.noise_psd_w_hz \
            * system.bandwidth_hz
        den = system.c_m_s ** 2 * system.tx_power_w * system.g_t
        return cls(w1=num / (den * system.g_r_ml), w2=num / (den * system.g_r_sl))


def snr_scale(d_km: float, w: float, alpha: float) -> float:
    """Mean SNR per unit gain, 1 / (w d^alpha), with d given in km."""
    if d_km <= 0.0:
        raise ValueError(f"distance must be > 0 km, got {d_km}")
    return 1.0 / (w * (d_km * KM_TO_M) ** alpha)
