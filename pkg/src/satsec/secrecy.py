"""Exact secrecy metrics under the binomial constellation model.

Ergodic secrecy capacity, secrecy outage probability, and outage secrecy
capacity are assembled from the closed-form SNR distributions by
marginalizing over the (p, q) lobe-occupancy counts and integrating over
the serving SNR. The (p, q) sum is truncated once its multinomial mass
covers 1 - pq_mass_eps; the semi-infinite integrals are truncated where
the serving survival function drops below tail_eps.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray

from satsec.pointprocess import enumerate_case_terms
from satsec.quadrature import integrate
from satsec.snrdist import (Scenario, serving_snr_cdf, serving_snr_pdf,
                            serving_snr_quantile, _lobe_base)
from satsec.specfun import DEFAULT_SERIES, SeriesControl, SeriesInfo

N_EXACT_CAP = 500
LN2 = math.log(2.0)


class InfeasibleTargetWarning(UserWarning):
    """Outage target epsilon is not reachable even at zero target rate."""


@dataclass(frozen=True)
class QuadratureControl:
    """Integration, truncation, and series policy for the metric integrals."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    tail_eps: float = 1e-10
    pq_mass_eps: float = 1e-9
    max_subdivisions: int = 2000
    series: SeriesControl = DEFAULT_SERIES

    def __post_init__(self) -> None:
        for name in ("abs_tol", "rel_tol", "tail_eps", "pq_mass_eps"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")


DEFAULT_QUAD = QuadratureControl()


@dataclass
class SecrecyReport:
    """Computed metrics with provenance and numeric diagnostics."""

    method: str
    c_erg: float | None = None
    p_out: float | None = None
    c_out: float | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.c_erg is not None and self.c_erg < 0.0:
            raise ValueError("c_erg must be >= 0")
        if self.p_out is not None and not 0.0 <= self.p_out <= 1.0:
            raise ValueError("p_out must be in [0, 1]")


class MetricEngine:
    """Quadrature assembly of the secrecy metrics over an eavesdropper CDF.

    Subclasses supply ``joint_eav_cdf``, the eavesdropper-side CDF already
    marginalized over satellite counts; the capacity and outage integrals
    against the serving SNR law are shared.
    """

    def __init__(self, scn: Scenario, ctrl: QuadratureControl = DEFAULT_QUAD,
                 workers: int | None = None) -> None:
        self.scn = scn
        self.ctrl = ctrl
        self.workers = workers
        self.info = SeriesInfo()
        self.x_max = serving_snr_quantile(1.0 - ctrl.tail_eps, scn, ctrl.series)
        self.n_integrals = 0

    def joint_eav_cdf(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        raise NotImplementedError

    def c_erg(self) -> float:
        def integrand(x: NDArray) -> NDArray:
            surv = 1.0 - serving_snr_cdf(x, self.scn, self.ctrl.series, self.info)
            return self.joint_eav_cdf(x) * surv / (1.0 + x)

        res = integrate(integrand, 0.0, self.x_max, abs_tol=self.ctrl.abs_tol,
                        rel_tol=self.ctrl.rel_tol,
                        max_subdivisions=self.ctrl.max_subdivisions,
                        workers=self.workers)
        self.n_integrals += 1
        return max(res.value / LN2, 0.0)

    def p_out(self, r_t: float) -> float:
        if r_t < 0.0:
            raise ValueError(f"target secrecy rate must be >= 0, got {r_t}")
        x0 = 2.0 ** r_t - 1.0
        if x0 >= self.x_max:
            # Serving SNR almost surely below the target threshold.
            return 1.0
        scale = 2.0 ** (-r_t)

        def integrand(x: NDArray) -> NDArray:
            u = np.maximum(scale * (1.0 + x) - 1.0, 0.0)
            dens = serving_snr_pdf(x, self.scn, self.ctrl.series, self.info)
            return self.joint_eav_cdf(u) * dens

        res = integrate(integrand, x0, self.x_max, abs_tol=self.ctrl.abs_tol,
                        rel_tol=self.ctrl.rel_tol,
                        max_subdivisions=self.ctrl.max_subdivisions,
                        workers=self.workers)
        self.n_integrals += 1
        return min(max(1.0 - res.value, 0.0), 1.0)

    def c_out(self, epsilon: float) -> tuple[float, float]:
        """Outage capacity (1-eps) R* and the bisection residual."""
        r_hi = math.log2(1.0 + serving_snr_quantile(1.0 - 1e-6, self.scn,
                                                    self.ctrl.series))
        r_star, residual = solve_outage_capacity(self.p_out, epsilon, r_hi)
        return (1.0 - epsilon) * r_star, residual

    def diagnostics(self) -> dict[str, Any]:
        return {
            "x_max": self.x_max,
            "n_integrals": self.n_integrals,
            "series_max_terms": self.info.max_terms,
            "series_degraded": self.info.degraded,
        }


class ExactEvaluator(MetricEngine):
    """Count-marginalized exact evaluation over the (p, q) multinomial terms."""

    def __init__(self, scn: Scenario, ctrl: QuadratureControl = DEFAULT_QUAD,
                 workers: int | None = None) -> None:
        layer = scn.single_layer
        if layer.count > N_EXACT_CAP:
            raise ValueError(
                f"exact metrics support N <= {N_EXACT_CAP} (got {layer.count}); "
                "use the approx module for larger constellations")
        super().__init__(scn, ctrl, workers)
        terms, mass = enumerate_case_terms(layer, ctrl.pq_mass_eps, scn.system.r_km)
        self._probs = np.array([t[2] for t in terms])
        p_vals = np.array([t[0] for t in terms], dtype=np.int64)
        q_vals = np.array([t[1] for t in terms], dtype=np.int64)
        self._p_unique, self._p_idx = np.unique(p_vals, return_inverse=True)
        self._q_unique, self._q_idx = np.unique(q_vals, return_inverse=True)
        self.pq_mass = mass
        self.n_pq_terms = len(terms)

    def joint_eav_cdf(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """sum_{p,q} P[N,p,q] F^(p,q)(x), the count-marginalized eavesdropper CDF."""
        xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
        layer = self.scn.single_layer
        base_ml = np.zeros(xa.shape)
        base_sl = np.zeros(xa.shape)
        pos = xa > 0.0
        if np.any(pos):
            base_ml[pos] = _lobe_base(xa[pos], layer.altitude_km, layer.d_th_km,
                                      self.scn.budget.w1, self.scn,
                                      self.ctrl.series, self.info)
            base_sl[pos] = _lobe_base(xa[pos], layer.d_th_km, layer.d_max_km,
                                      self.scn.budget.w2, self.scn,
                                      self.ctrl.series, self.info)
        pow_ml = np.power(base_ml[None, :], self._p_unique[:, None].astype(np.float64))
        pow_sl = np.power(base_sl[None, :], self._q_unique[:, None].astype(np.float64))
        return (self._probs[:, None] * pow_ml[self._p_idx] * pow_sl[self._q_idx]).sum(axis=0)

    def diagnostics(self) -> dict[str, Any]:
        out = super().diagnostics()
        out["pq_terms"] = self.n_pq_terms
        out["pq_mass"] = self.pq_mass
        return out


def ergodic_secrecy_capacity(scn: Scenario, ctrl: QuadratureControl = DEFAULT_QUAD,
                             workers: int | None = None) -> float:
    """Ergodic secrecy capacity in bits/s/Hz (exact count-marginalized form)."""
    return ExactEvaluator(scn, ctrl, workers).c_erg()


def secrecy_outage_probability(scn: Scenario, r_t: float,
                               ctrl: QuadratureControl = DEFAULT_QUAD,
                               workers: int | None = None) -> float:
    """Secrecy outage probability P[R < r_t] (exact count-marginalized form)."""
    return ExactEvaluator(scn, ctrl, workers).p_out(r_t)


def solve_outage_capacity(p_out_fn, epsilon: float, r_hi: float,
                          residual_tol: float = 1e-5,
                          max_iter: int = 200) -> tuple[float, float]:
    """Bisect a monotone outage curve for P_out(R*) = epsilon.

    Returns (R*, residual). Shared by the exact, approximate, and
    multi-altitude metric paths.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    p0 = p_out_fn(0.0)
    if p0 >= epsilon:
        warnings.warn(
            f"outage target epsilon={epsilon} infeasible: P_out(0)={p0:.6g}",
            InfeasibleTargetWarning, stacklevel=2)
        return 0.0, p0 - epsilon
    for _ in range(8):
        if p_out_fn(r_hi) >= epsilon:
            break
        r_hi *= 2.0
    lo, hi = 0.0, r_hi
    p_mid = p0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        p_mid = p_out_fn(mid)
        if abs(p_mid - epsilon) < residual_tol:
            return mid, p_mid - epsilon
        if p_mid < epsilon:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(hi, 1.0):
            break
    mid = 0.5 * (lo + hi)
    return mid, p_out_fn(mid) - epsilon


def outage_secrecy_capacity(scn: Scenario, epsilon: float,
                            ctrl: QuadratureControl = DEFAULT_QUAD,
                            workers: int | None = None) -> float:
    """Outage secrecy capacity (1 - epsilon) R_t* with P_out(R_t*) = epsilon."""
    value, _ = ExactEvaluator(scn, ctrl, workers).c_out(epsilon)
    return value


def build_report(engine: MetricEngine, method: str, r_t: float | None,
                 epsilon: float | None, want_c_erg: bool = True) -> SecrecyReport:
    """Evaluate the requested metrics on a shared engine."""
    report = SecrecyReport(method=method)
    if want_c_erg:
        report.c_erg = engine.c_erg()
    if r_t is not None:
        report.p_out = engine.p_out(r_t)
    if epsilon is not None:
        report.c_out, residual = engine.c_out(epsilon)
        report.diagnostics["bisection_residual"] = residual
    report.diagnostics.update(engine.diagnostics())
    return report


def exact_secrecy_report(scn: Scenario, r_t: float | None = None,
                         epsilon: float | None = None,
                         ctrl: QuadratureControl = DEFAULT_QUAD,
                         workers: int | None = None) -> SecrecyReport:
    """All requested exact metrics computed over one shared evaluator."""
    return build_report(ExactEvaluator(scn, ctrl, workers), "exact", r_t, epsilon)
