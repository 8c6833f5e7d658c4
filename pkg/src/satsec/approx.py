"""Poisson-limit approximations, asymptotic regimes, and the multi-altitude extension.

Replacing the binomial constellation by an intensity-matched Poisson
process turns the (p, q) count sum into a single product of exponential
CDFs, so each metric needs one quadrature call regardless of N. The same
product structure extends to V altitude layers. Asymptotic regimes cover
the no-eavesdropper limit, the dense-constellation limit, and the
high-transmit-power characterization (slope and power offset).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from satsec.channel import KM_TO_M
from satsec.geometry import EavesdropperLayer
from satsec.pointprocess import distance_cdf_shell
from satsec.quadrature import integrate
from satsec.secrecy import (DEFAULT_QUAD, LN2, MetricEngine, QuadratureControl,
                            SecrecyReport, build_report)
from satsec.snrdist import Scenario, _weighted_kernel_sum, serving_snr_cdf
from satsec.specfun import (SeriesControl, SeriesInfo, pochhammer,
                            upper_incomplete_gamma_nonpos)


def _ppp_lobe_cdf(x: ArrayLike, layer: EavesdropperLayer, scn: Scenario,
                  lobe: str, ctrl: SeriesControl,
                  info: SeriesInfo | None) -> NDArray[np.float64]:
    """exp(-N/2 [shell-measure - kernel/(r(r+a_e))]) for one lobe of one layer."""
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(xa < 0.0):
        raise ValueError("SNR threshold must be >= 0")
    r_m = scn.system.r_km * KM_TO_M
    ae_m = layer.altitude_km * KM_TO_M
    if lobe == "main":
        lo_m, hi_m = ae_m, layer.d_th_km * KM_TO_M
        w = scn.budget.w1
        measure = 1.0 - math.cos(layer.psi_th)
    else:
        lo_m, hi_m = layer.d_th_km * KM_TO_M, layer.d_max_km * KM_TO_M
        w = scn.budget.w2
        measure = math.cos(layer.psi_th) - scn.system.r_km / (scn.system.r_km + layer.altitude_km)
    kernel = np.zeros(xa.shape)
    pos = xa > 0.0
    if np.any(pos) and hi_m > lo_m:
        kernel[pos] = _weighted_kernel_sum(xa[pos], lo_m, hi_m, w, scn.fading,
                                           scn.system.alpha, ctrl, info)
    exponent = -0.5 * layer.count * (measure - kernel / (r_m * (r_m + ae_m)))
    return np.exp(np.minimum(exponent, 0.0))


def ppp_eav_mainlobe_cdf(x: ArrayLike, layer: EavesdropperLayer, scn: Scenario,
                         ctrl: SeriesControl | None = None,
                         info: SeriesInfo | None = None) -> NDArray[np.float64]:
    """Poisson-process CDF of the strongest main-lobe eavesdropper SNR."""
    ctrl = ctrl or DEFAULT_QUAD.series
    return _ppp_lobe_cdf(x, layer, scn, "main", ctrl, info)


def ppp_eav_sidelobe_cdf(x: ArrayLike, layer: EavesdropperLayer, scn: Scenario,
                         ctrl: SeriesControl | None = None,
                         info: SeriesInfo | None = None) -> NDArray[np.float64]:
    """Poisson-process CDF of the strongest side-lobe eavesdropper SNR."""
    ctrl = ctrl or DEFAULT_QUAD.series
    return _ppp_lobe_cdf(x, layer, scn, "side", ctrl, info)


class PoissonEvaluator(MetricEngine):
    """Single-integral metric engine over the layer-product Poisson CDF."""

    def joint_eav_cdf(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
        out = np.ones(xa.shape)
        for layer in self.scn.layers:
            out *= _ppp_lobe_cdf(xa, layer, self.scn, "main", self.ctrl.series, self.info)
            out *= _ppp_lobe_cdf(xa, layer, self.scn, "side", self.ctrl.series, self.info)
        return out


def approx_secrecy_metrics(scn: Scenario, r_t: float | None = None,
                           epsilon: float | None = None,
                           ctrl: QuadratureControl = DEFAULT_QUAD,
                           workers: int | None = None) -> SecrecyReport:
    """Poisson-limit secrecy metrics; one quadrature per metric, any N."""
    return build_report(PoissonEvaluator(scn, ctrl, workers), "approx", r_t, epsilon)


def multi_altitude_metrics(scn: Scenario, r_t: float | None = None,
                           epsilon: float | None = None,
                           ctrl: QuadratureControl = DEFAULT_QUAD,
                           workers: int | None = None) -> SecrecyReport:
    """Layered-constellation metrics via the per-layer Poisson product CDF.

    With a single layer this is identical to approx_secrecy_metrics.
    """
    return approx_secrecy_metrics(scn, r_t, epsilon, ctrl, workers)


def capacity_no_eavesdroppers(scn: Scenario) -> float:
    """Legitimate-link ergodic capacity, the no-eavesdropper closed form.

    Exact for integer fading order m; otherwise the order is truncated to
    floor(m) and a warning is emitted.
    """
    fading = scn.fading
    m_int = math.floor(fading.m)
    if fading.m != m_int:
        warnings.warn(
            f"no-eavesdropper capacity uses integer fading order floor(m)={m_int} "
            f"in place of m={fading.m}", UserWarning, stacklevel=2)
    if m_int < 1:
        raise ValueError("fading order m must be >= 1 for the closed form")
    tb = 2.0 * fading.b
    delta = fading.delta
    lam = 1.0 / tb - delta
    g = scn.serving_gain_factor
    xi = lam * g
    exp_xi = math.exp(xi)
    total = 0.0
    for k in range(m_int):
        coef_k = (-1.0) ** k * pochhammer(1.0 - fading.m, k) * delta ** k / math.factorial(k)
        for t in range(k + 1):
            term = (coef_k * g ** t / lam ** (k - t + 1)
                    * exp_xi * upper_incomplete_gamma_nonpos(t, xi))
            total += term
    return fading.k_const * total / LN2


def outage_no_eavesdroppers(scn: Scenario, r_t: float,
                            ctrl: SeriesControl | None = None) -> float:
    """No-eavesdropper outage: probability the legitimate link misses r_t."""
    if r_t < 0.0:
        raise ValueError(f"target rate must be >= 0, got {r_t}")
    ctrl = ctrl or DEFAULT_QUAD.series
    return float(serving_snr_cdf(2.0 ** r_t - 1.0, scn, ctrl))


def degenerate_many_eavesdroppers() -> SecrecyReport:
    """Dense-constellation limit: secrecy vanishes, outage is certain."""
    return SecrecyReport(method="asymptotic", c_erg=0.0, p_out=1.0, c_out=0.0,
                         diagnostics={"limit": "N -> infinity"})


@dataclass(frozen=True)
class HighSnrCharacterization:
    """High-power capacity ceiling with its slope/offset decomposition."""

    c_erg_inf: float
    slope: float
    offset: float
    lambda_terms: tuple[float, float]
    conditioning_flag: bool

    def assembled(self, tx_power_w: float) -> float:
        """Reconstruction slope * (log2 P - offset); equals c_erg_inf."""
        return self.slope * (math.log2(tx_power_w) - self.offset)


def _conditional_mean_distance(lo_km: float, hi_km: float, n: int, a_e: float,
                               r: float) -> tuple[float, bool]:
    """E[d0 | lo < d0 <= hi] for the nearest of n shell satellites, in km.

    Binomial expansion with compensated summation up to n = 60; direct
    quadrature of the equivalent integral beyond. Returns the mean and a
    flag marking > 6 digits cancellation loss.
    """
    c = 1.0 / (4.0 * r * (r + a_e))
    big_b = 1.0 + a_e * a_e * c
    surv_lo = (1.0 - float(distance_cdf_shell(lo_km, a_e, r))) ** n
    surv_hi = (1.0 - float(distance_cdf_shell(hi_km, a_e, r))) ** n
    denom = surv_lo - surv_hi
    if denom <= 0.0:
        raise ValueError("conditioning interval has zero probability")
    if n <= 60:
        # Keep powers bounded: hi^(2i+3) c^i = hi^3 (c hi^2)^i, with c hi^2 << 1.
        terms = []
        for i in range(n):
            coef = math.comb(n - 1, i) * big_b ** (n - 1 - i) * (-1.0) ** i / (2 * i + 3)
            terms.append(coef * (hi_km ** 3 * (c * hi_km * hi_km) ** i
                                 - lo_km ** 3 * (c * lo_km * lo_km) ** i))
        numer = n * 2.0 * c * math.fsum(terms)
        peak = max(abs(t) for t in terms) * n * 2.0 * c
        flag = peak > 0.0 and numer != 0.0 and math.log10(peak / abs(numer)) > 6.0
    else:
        def integrand(z: NDArray) -> NDArray:
            surv = 1.0 - distance_cdf_shell(z, a_e, r)
            return z * z * surv ** (n - 1)

        res = integrate(integrand, lo_km, hi_km, abs_tol=1e-12, rel_tol=1e-10)
        numer = n * 2.0 * c * res.value
        flag = False
    return numer / denom, flag


def high_snr_characterization(scn: Scenario) -> HighSnrCharacterization:
    """Capacity ceiling, high-power slope, and power offset for one layer.

    The ceiling conditions on where the nearest eavesdropper lands (main
    lobe, side lobe, or outside visibility) and replaces distances by their
    conditional means; slope and offset follow from the power dependence
    entering only through the serving SNR scale.
    """
    layer = scn.single_layer
    sysp = scn.system
    r = sysp.r_km
    a_e = layer.altitude_km
    n = layer.count
    surv_th = (1.0 - float(distance_cdf_shell(layer.d_th_km, a_e, r))) ** n
    surv_max = (1.0 - float(distance_cdf_shell(layer.d_max_km, a_e, r))) ** n
    a1 = 1.0 - surv_th
    a2 = surv_th - surv_max
    a3 = surv_max
    d_s = scn.serving.distance_km
    flag = False
    if n >= 1 and not layer.degenerate_mainlobe:
        lam1, f1 = _conditional_mean_distance(a_e, layer.d_th_km, n, a_e, r)
        flag = flag or f1
    else:
        lam1 = math.nan
    if n >= 1 and not layer.degenerate_sidelobe:
        lam2, f2 = _conditional_mean_distance(layer.d_th_km, layer.d_max_km, n, a_e, r)
        flag = flag or f2
    else:
        lam2 = math.nan
    alpha = sysp.alpha
    xi3 = math.log2(scn.fading.mean_power / scn.serving_gain_factor)
    c_inf = a3 * xi3
    if a1 > 0.0:
        c_inf += a1 * alpha * math.log2(lam1 / d_s)
    if a2 > 0.0:
        c_inf += a2 * (math.log2(scn.budget.w2 / scn.budget.w1)
                       + alpha * math.log2(lam2 / d_s))
    slope = a3
    offset = math.log2(sysp.tx_power_w) - c_inf / slope
    return HighSnrCharacterization(c_erg_inf=c_inf, slope=slope, offset=offset,
                                   lambda_terms=(lam1, lam2),
                                   conditioning_flag=flag)
