"""Adaptive Gauss-Kronrod quadrature with batched integrand evaluation.

The secrecy integrands are smooth but expensive (truncated special-function
series), so each refinement round evaluates every pending subinterval's
15 Kronrod nodes in a single vectorized call. Interval bookkeeping and the
final reduction are kept in a fixed deterministic order, so results do not
depend on scheduling or worker hints.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

# 15-point Kronrod nodes on [-1, 1] (ascending) with Kronrod weights and the
# embedded 7-point Gauss weights on the odd-indexed subset.
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_WG = np.zeros(15)
_WG[1::2] = [0.129484966168870, 0.279705391489277, 0.381830050505119,
             0.417959183673469, 0.381830050505119, 0.279705391489277,
             0.129484966168870]


class QuadratureWarning(UserWarning):
    """Raised when the subdivision budget is exhausted before the tolerance."""


@dataclass
class QuadResult:
    """Integral value with an error estimate and evaluation count."""

    value: float
    error: float
    n_evals: int
    converged: bool


def _panel_estimates(f, lo: NDArray, hi: NDArray) -> tuple[NDArray, NDArray, int]:
    # One batched call over all panels' Kronrod nodes.
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * _XK[None, :]
    vals = f(nodes.ravel()).reshape(nodes.shape)
    i_k = (vals * _WK[None, :]).sum(axis=1) * half
    i_g = (vals * _WG[None, :]).sum(axis=1) * half
    return i_k, np.abs(i_k - i_g), vals.size


def integrate(f, a: float, b: float, *, abs_tol: float = 1e-10,
              rel_tol: float = 1e-8, max_subdivisions: int = 2000,
              initial_panels: int = 8, workers: int | None = None) -> QuadResult:
    """Integrate a vectorized callable f over [a, b].

    ``f`` receives a 1-D array of abscissae and must return values of the
    same shape. ``workers`` is accepted as a scheduling hint only; the
    result is identical for any value.
    """
    del workers
    if abs_tol <= 0.0 or rel_tol <= 0.0:
        raise ValueError("abs_tol and rel_tol must be > 0")
    if max_subdivisions < 1 or initial_panels < 1:
        raise ValueError("max_subdivisions and initial_panels must be >= 1")
    if b == a:
        return QuadResult(0.0, 0.0, 0, True)
    if b < a:
        raise ValueError(f"require b >= a, got [{a}, {b}]")
    edges = np.linspace(a, b, initial_panels + 1)
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    vals, errs, n_evals = _panel_estimates(f, lo, hi)

    for _ in range(max_subdivisions):
        total = math.fsum(vals)
        tol = max(abs_tol, rel_tol * abs(total))
        total_err = math.fsum(errs)
        if total_err <= tol:
            return QuadResult(total, total_err, n_evals, True)
        # Refine every panel holding more than its proportional error share.
        refine = errs > tol / len(lo)
        if not np.any(refine):
            refine = errs >= errs.max()
        r_lo, r_hi = lo[refine], hi[refine]
        mid = 0.5 * (r_lo + r_hi)
        new_lo = np.concatenate([r_lo, mid])
        new_hi = np.concatenate([mid, r_hi])
        new_vals, new_errs, evals = _panel_estimates(f, new_lo, new_hi)
        n_evals += evals
        lo = np.concatenate([lo[~refine], new_lo])
        hi = np.concatenate([hi[~refine], new_hi])
        vals = np.concatenate([vals[~refine], new_vals])
        errs = np.concatenate([errs[~refine], new_errs])
        # Keep panels sorted so the fsum reduction order is deterministic.
        order = np.argsort(lo, kind="stable")
        lo, hi, vals, errs = lo[order], hi[order], vals[order], errs[order]

    total = math.fsum(vals)
    total_err = math.fsum(errs)
    warnings.warn(
        f"quadrature used all {max_subdivisions} refinement rounds; "
        f"error estimate {total_err:.3e}", QuadratureWarning, stacklevel=2)
    return QuadResult(total, total_err, n_evals, False)
