"""Monte-Carlo simulation oracle for every secrecy metric.

Trials are partitioned into fixed-size chunks; chunk i draws from the
counter-based substream Philox(seed).jumped(i), and partial results are
reduced in chunk order. The outcome is therefore bit-identical for any
worker count. Draw order within a chunk is fixed: serving fades first,
then per layer cos(psi), azimuth, and the fades of effective satellites.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from satsec.channel import KM_TO_M, sr_sample
from satsec.geometry import EavesdropperLayer
from satsec.snrdist import Scenario

CHUNK_TRIALS = 16_384
_QUANTILE_GRID = np.linspace(0.0, 1.0, 101)


@dataclass
class TrialBatchResult:
    """Aggregated simulation estimates with 95% confidence half-widths."""

    n_trials: int
    seed: int
    mean_secrecy_rate: float
    rate_ci_halfwidth: float
    rt_grid: NDArray[np.float64]
    outage_frequency: NDArray[np.float64]
    outage_ci_halfwidth: NDArray[np.float64]
    case_frequencies: NDArray[np.float64]
    case_ci_halfwidth: NDArray[np.float64]
    mean_effective_count: float
    effective_count_ci_halfwidth: float
    gamma_s_quantiles: NDArray[np.float64]
    gamma_e_quantiles: NDArray[np.float64]
    rate_samples: NDArray[np.float64]

    def rate_quantile(self, prob: float) -> float:
        """Empirical quantile of the per-trial secrecy rate."""
        return float(np.quantile(self.rate_samples, prob, method="inverted_cdf"))

    def outage_capacity(self, epsilon: float) -> tuple[float, float]:
        """(1-eps) times the eps-quantile of the rate, with a CI half-width."""
        r_star = self.rate_quantile(epsilon)
        half = 1.96 * math.sqrt(epsilon * (1.0 - epsilon) / self.n_trials)
        lo = self.rate_quantile(max(epsilon - half, 0.0))
        hi = self.rate_quantile(min(epsilon + half, 1.0))
        return (1.0 - epsilon) * r_star, (1.0 - epsilon) * 0.5 * (hi - lo)


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed).jumped(chunk_index))


def _draw_layer(layer: EavesdropperLayer, rng: np.random.Generator, n: int,
                r_km: float) -> tuple[NDArray, NDArray]:
    """cos(polar angle) and lobe labels (0 invisible, 1 main, 2 side) for one layer."""
    cos_psi = rng.uniform(-1.0, 1.0, size=(n, layer.count))
    rng.uniform(0.0, 2.0 * math.pi, size=(n, layer.count))  # azimuth: symmetric, unused
    cos_max = r_km / (r_km + layer.altitude_km)
    cos_th = math.cos(layer.psi_th)
    labels = np.zeros(cos_psi.shape, dtype=np.int8)
    labels[cos_psi >= cos_max] = 2
    labels[cos_psi >= cos_th] = 1
    return cos_psi, labels


def sample_constellation(layer: EavesdropperLayer, rng: np.random.Generator,
                         n_trials: int,
                         r_km: float = 6378.0) -> tuple[NDArray, NDArray]:
    """Polar angles (n_trials, N) and lobe labels for one shell layer."""
    cos_psi, labels = _draw_layer(layer, rng, n_trials, r_km)
    return np.arccos(np.clip(cos_psi, -1.0, 1.0)), labels


def _simulate_chunk(scn: Scenario, rt_grid: NDArray, seed: int,
                    chunk_index: int, size: int) -> dict:
    rng = _chunk_rng(seed, chunk_index)
    g = scn.serving_gain_factor
    gamma_s = sr_sample(scn.fading, rng, size) / g
    gamma_e = np.zeros(size)
    p_tot = np.zeros(size, dtype=np.int64)
    q_tot = np.zeros(size, dtype=np.int64)
    r_m = scn.system.r_km * KM_TO_M
    alpha = scn.system.alpha
    for layer in scn.layers:
        if layer.count == 0:
            continue
        cos_psi, labels = _draw_layer(layer, rng, size, scn.system.r_km)
        main = labels == 1
        side = labels == 2
        p_tot += main.sum(axis=1)
        q_tot += side.sum(axis=1)
        eff = main | side
        if not np.any(eff):
            continue
        re_m = (scn.system.r_km + layer.altitude_km) * KM_TO_M
        d_m = np.sqrt(r_m * r_m + re_m * re_m - 2.0 * r_m * re_m * cos_psi[eff])
        gains = sr_sample(scn.fading, rng, int(eff.sum()))
        w = np.where(main[eff], scn.budget.w1, scn.budget.w2)
        snr = np.zeros(cos_psi.shape)
        snr[eff] = gains / (w * d_m ** alpha)
        gamma_e = np.maximum(gamma_e, snr.max(axis=1))
    rate = np.log2((1.0 + gamma_s) / (1.0 + gamma_e))
    np.maximum(rate, 0.0, out=rate)
    outage = (rate[None, :] <= rt_grid[:, None]).sum(axis=1)
    cases = np.array([
        ((p_tot == 0) & (q_tot == 0)).sum(),
        ((p_tot == 0) & (q_tot > 0)).sum(),
        ((p_tot > 0) & (q_tot == 0)).sum(),
        ((p_tot > 0) & (q_tot > 0)).sum(),
    ], dtype=np.int64)
    return {
        "rate_sum": rate.sum(),
        "rate_sq_sum": (rate * rate).sum(),
        "outage": outage,
        "cases": cases,
        "eff_sum": (p_tot + q_tot).sum(),
        "eff_sq_sum": ((p_tot + q_tot) ** 2).sum(),
        "gamma_s": gamma_s,
        "gamma_e": gamma_e,
        "rate": rate,
    }


def simulate_secrecy(scn: Scenario, rt_grid, n_trials: int, seed: int,
                     workers: int = 1) -> TrialBatchResult:
    """Simulate the secrecy rate distribution; deterministic given seed."""
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    rt = np.atleast_1d(np.asarray(rt_grid, dtype=np.float64))
    n_chunks = (n_trials + CHUNK_TRIALS - 1) // CHUNK_TRIALS
    sizes = [min(CHUNK_TRIALS, n_trials - i * CHUNK_TRIALS) for i in range(n_chunks)]

    def run(i: int) -> dict:
        return _simulate_chunk(scn, rt, seed, i, sizes[i])

    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_chunks)))
    else:
        parts = [run(i) for i in range(n_chunks)]

    # Fixed chunk-order reduction keeps every statistic worker-invariant.
    rate_sum = math.fsum(p["rate_sum"] for p in parts)
    rate_sq = math.fsum(p["rate_sq_sum"] for p in parts)
    outage = np.sum([p["outage"] for p in parts], axis=0)
    cases = np.sum([p["cases"] for p in parts], axis=0)
    eff_sum = math.fsum(float(p["eff_sum"]) for p in parts)
    eff_sq = math.fsum(float(p["eff_sq_sum"]) for p in parts)
    gamma_s = np.concatenate([p["gamma_s"] for p in parts])
    gamma_e = np.concatenate([p["gamma_e"] for p in parts])
    rate = np.concatenate([p["rate"] for p in parts])

    n = float(n_trials)
    mean_rate = rate_sum / n
    var_rate = max(rate_sq / n - mean_rate * mean_rate, 0.0)
    out_freq = outage / n
    case_freq = cases / n
    mean_eff = eff_sum / n
    var_eff = max(eff_sq / n - mean_eff * mean_eff, 0.0)
    return TrialBatchResult(
        n_trials=n_trials,
        seed=seed,
        mean_secrecy_rate=mean_rate,
        rate_ci_halfwidth=1.96 * math.sqrt(var_rate / n),
        rt_grid=rt,
        outage_frequency=out_freq,
        outage_ci_halfwidth=1.96 * np.sqrt(out_freq * (1.0 - out_freq) / n),
        case_frequencies=case_freq,
        case_ci_halfwidth=1.96 * np.sqrt(case_freq * (1.0 - case_freq) / n),
        mean_effective_count=mean_eff,
        effective_count_ci_halfwidth=1.96 * math.sqrt(var_eff / n),
        gamma_s_quantiles=np.quantile(gamma_s, _QUANTILE_GRID),
        gamma_e_quantiles=np.quantile(gamma_e, _QUANTILE_GRID),
        rate_samples=rate,
    )


def sample_serving_snr(scn: Scenario, n: int, seed: int) -> NDArray[np.float64]:
    """Independent serving-SNR draws for distribution tests."""
    rng = _chunk_rng(seed, 0)
    return sr_sample(scn.fading, rng, n) / scn.serving_gain_factor


def sample_conditioned_eav_snr(scn: Scenario, p: int, q: int, n: int,
                               seed: int) -> NDArray[np.float64]:
    """Draws of the strongest eavesdropper SNR given exact lobe counts (p, q).

    Conditioned chord distances come from the truncated quadratic laws by
    inverse-transform sampling; fades are independent per satellite.
    """
    if p < 0 or q < 0:
        raise ValueError("counts must be >= 0")
    layer = scn.single_layer
    rng = _chunk_rng(seed, 0)
    alpha = scn.system.alpha
    best = np.zeros(n)
    lo = layer.altitude_km * KM_TO_M
    mid = layer.d_th_km * KM_TO_M
    hi = layer.d_max_km * KM_TO_M
    if p > 0:
        u = rng.uniform(size=(n, p))
        d = np.sqrt(lo * lo + u * (mid * mid - lo * lo))
        h = sr_sample(scn.fading, rng, n * p).reshape(n, p)
        best = np.maximum(best, (h / (scn.budget.w1 * d ** alpha)).max(axis=1))
    if q > 0:
        u = rng.uniform(size=(n, q))
        d = np.sqrt(mid * mid + u * (hi * hi - mid * mid))
        h = sr_sample(scn.fading, rng, n * q).reshape(n, q)
        best = np.maximum(best, (h / (scn.budget.w2 * d ** alpha)).max(axis=1))
    return best
