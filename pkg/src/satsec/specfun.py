"""Gamma-family special functions and truncated-series control.

The closed-form secrecy expressions are built from incomplete gamma
functions evaluated at many points per quadrature batch, so the core
routines here are vectorized over numpy arrays. Scalar helpers cover
the negative-order upper incomplete gamma and the exponential integral
needed by the no-eavesdropper capacity formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

_EULER = 0.57721566490153286061
_FPMIN = 1e-300
_EPS = 1e-15
_MAX_ITER = 10_000


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the infinite shadowed-fading series.

    Summation stops once the latest term is below ``rel_tol`` times the
    accumulated sum (elementwise over the evaluation grid), or after
    ``n_max`` terms, whichever comes first.
    """

    rel_tol: float = 1e-12
    n_max: int = 500

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError(f"rel_tol must be in (0, 1), got {self.rel_tol}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")


DEFAULT_SERIES = SeriesControl()


@dataclass
class SeriesInfo:
    """Diagnostics accumulated across truncated-series evaluations."""

    max_terms: int = 0
    degraded: bool = False
    evaluations: int = 0

    def record(self, n_terms: int, converged: bool) -> None:
        self.max_terms = max(self.max_terms, n_terms)
        self.degraded = self.degraded or not converged
        self.evaluations += 1


def sum_series(term_fn, shape: tuple[int, ...], ctrl: SeriesControl = DEFAULT_SERIES,
               info: SeriesInfo | None = None) -> NDArray[np.float64]:
    """Sum ``term_fn(n)`` for n = 0, 1, ... under a relative-tolerance stop rule.

    ``term_fn`` must return nonnegative arrays of the given shape; terms are
    accumulated in fixed ascending order so results are deterministic.
    """
    acc = np.zeros(shape)
    n = 0
    converged = False
    while n < ctrl.n_max:
        term = term_fn(n)
        acc += term
        n += 1
        if n >= 2 and np.all(term <= ctrl.rel_tol * acc):
            converged = True
            break
    if info is not None:
        info.record(n, converged)
    return acc


def pochhammer(x: float, n: int) -> float:
    """Rising factorial (x)_n = x (x+1) ... (x+n-1), with (x)_0 = 1."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    out = 1.0
    for k in range(n):
        out *= x + k
    return out


def _reg_lower_gamma_series(a: float, x: NDArray) -> NDArray:
    # P(a, x) for x < a + 1: power series for gamma(a, x) x^a e^-x / Gamma(a+1).
    out = np.zeros_like(x)
    active = x > 0.0
    if not np.any(active):
        return out
    xv = x[active]
    term = np.ones_like(xv)
    total = np.ones_like(xv)
    denom = a
    for _ in range(_MAX_ITER):
        denom += 1.0
        term = term * xv / denom
        total += term
        if np.all(term <= _EPS * total):
            break
    log_pref = a * np.log(xv) - xv - math.lgamma(a + 1.0)
    out[active] = total * np.exp(log_pref)
    return out


def _reg_upper_gamma_cf(a: float, x: NDArray) -> NDArray:
    # Q(a, x) for x >= a + 1: modified Lentz continued fraction for Gamma(a, x).
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _FPMIN)
    d = 1.0 / np.maximum(b, _FPMIN)
    h = d.copy()
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        np.copyto(d, _FPMIN, where=np.abs(d) < _FPMIN)
        c = b + an / c
        np.copyto(c, _FPMIN, where=np.abs(c) < _FPMIN)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if np.all(np.abs(delta - 1.0) <= _EPS):
            break
    log_pref = a * np.log(x) - x - math.lgamma(a)
    return np.exp(log_pref) * h


def reg_lower_incomplete_gamma(a: float, x: ArrayLike) -> NDArray[np.float64]:
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).

    Series expansion for x < a + 1, continued fraction for the complement
    otherwise; vectorized over x. Requires a > 0 and x >= 0.
    """
    if a <= 0.0:
        raise ValueError(f"order a must be > 0, got {a}")
    xa = np.asarray(x, dtype=np.float64)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    if np.any(xa < 0.0):
        raise ValueError("x must be >= 0")
    out = np.empty_like(xa)
    low = xa < a + 1.0
    if np.any(low):
        out[low] = _reg_lower_gamma_series(a, xa[low])
    high = ~low
    if np.any(high):
        out[high] = 1.0 - _reg_upper_gamma_cf(a, xa[high])
    np.clip(out, 0.0, 1.0, out=out)
    return out[0] if scalar else out


def lower_incomplete_gamma(a: float, x: ArrayLike) -> NDArray[np.float64]:
    """Unregularized lower incomplete gamma gamma(a, x). Overflows for a >~ 170."""
    return reg_lower_incomplete_gamma(a, x) * math.gamma(a)


def exp1(x: float) -> float:
    """Exponential integral E1(x) for x > 0.

    Power series for x <= 1, modified Lentz continued fraction otherwise;
    both iterated to 1e-14 relative accuracy.
    """
    if x <= 0.0:
        raise ValueError(f"x must be > 0, got {x}")
    if x <= 1.0:
        total = -_EULER - math.log(x)
        term = 1.0
        for k in range(1, _MAX_ITER):
            term *= -x / k
            contrib = -term / k
            total += contrib
            if abs(contrib) <= 1e-14 * max(abs(total), _FPMIN):
                break
        return total
    # E1(x) = e^-x / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))), Lentz form.
    b = x + 1.0
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * i
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= 1e-14:
            break
    return math.exp(-x) * h


def upper_incomplete_gamma_nonpos(t: int, x: float) -> float:
    """Upper incomplete gamma Gamma(-t, x) for integer order t >= 0 and x > 0.

    Seeded at Gamma(0, x) = E1(x) and carried down through the recurrence
    Gamma(a-1, x) = (Gamma(a, x) - x^(a-1) e^-x) / (a - 1).
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if x <= 0.0:
        raise ValueError(f"x must be > 0, got {x}")
    val = exp1(x)
    for k in range(1, t + 1):
        val = (x ** (-k) * math.exp(-x) - val) / k
    return val
