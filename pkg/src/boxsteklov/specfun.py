"""Transcendental frequency-to-eigenvalue map t(s), its slope numerator theta(s)
and the inverse h(t) on the monotone branch s >= 1.

    t(s) = 2 s^3 (sinh s cosh s + s) / (sinh^2 s - s^2)

Two evaluation routes are provided.  ``EvalMode.NAIVE`` is the literal
hyperbolic expression and overflows near s ~ 355.  ``EvalMode.STABLE`` (the
default) divides numerator and denominator by e^{2s}/4:

    numerator   -> 1 - e^{-4s} + 4 s e^{-2s}
    denominator -> 1 + e^{-4s} - 2 e^{-2s} - 4 s^2 e^{-2s}

and evaluates the denominator as the product (2e^{-s}(sinh s - s)) *
(2e^{-s}(sinh s + s)) so the O(s^4) cancellation at small s is avoided.
"""
from __future__ import annotations

import math
from enum import Enum

import numpy as np

__all__ = [
    "EvalMode",
    "SpecfunDomainError",
    "t_fn",
    "t_prime",
    "theta_fn",
    "theta_scaled",
    "h_fn",
    "T_AT_ONE",
]


class SpecfunDomainError(ValueError):
    """Argument outside the domain where a function is defined."""


class EvalMode(Enum):
    NAIVE = "naive"
    STABLE = "stable"


# below this the 4-term Taylor expansion is used
_TAYLOR_CUTOFF = 1e-3
_TAYLOR = (12.0, 12.0 / 5.0, 64.0 / 175.0, -4.0 / 7875.0)

# theta switches to the e^{4s}-scaled form above this
_THETA_SCALED_FROM = 20.0

_H_RTOL = 1e-13
# rounding allowance on the lower end of h's domain; inputs within it map to s = 1
_T_ONE_SLACK = 1e-13
_H_MAXITER = 200


def _cbrt(x: float) -> float:
    return float(np.cbrt(x))


def _check_positive(s, name="s"):
    arr = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise SpecfunDomainError(f"{name} must be positive and finite, got {s!r}")
    return arr


def _sinh_minus_x(x):
    """sinh(x) - x without cancellation for small x (array in, array out)."""
    x = np.asarray(x, dtype=float)
    small = x < 1.0
    xs = np.where(small, x, 0.0)
    # sum_{k>=1} x^{2k+1}/(2k+1)!; 12 terms reach 1e-30 relative for x < 1
    term = xs**3 / 6.0
    series = term.copy()
    x2 = xs * xs
    for k in range(2, 14):
        term = term * x2 / ((2 * k) * (2 * k + 1))
        series = series + term
    with np.errstate(over="ignore"):
        big = np.sinh(np.where(small, 1.0, x)) - np.where(small, 1.0, x)
    return np.where(small, series, big)


def _scaled_pair(s):
    """Return (2e^{-s}(sinh s - s), 2e^{-s}(sinh s + s)) for s > 0."""
    em = np.exp(-s)
    one_minus = -np.expm1(-2.0 * s)
    minus = np.where(s < 1.0, 2.0 * em * _sinh_minus_x(np.minimum(s, 1.0)),
                     one_minus - 2.0 * s * em)
    plus = one_minus + 2.0 * s * em
    return minus, plus


def _t_stable(s):
    num = -np.expm1(-4.0 * s) + 4.0 * s * np.exp(-2.0 * s)
    minus, plus = _scaled_pair(s)
    return 2.0 * s**3 * num / (minus * plus)


def _t_naive(s):
    with np.errstate(over="ignore", invalid="ignore"):
        sh = np.sinh(s)
        ch = np.cosh(s)
        return 2.0 * s**3 * (sh * ch + s) / (sh * sh - s * s)


def _t_taylor(s):
    s2 = s * s
    c0, c1, c2, c3 = _TAYLOR
    return c0 + s2 * (c1 + s2 * (c2 + s2 * c3))


def t_fn(s, mode: EvalMode = EvalMode.STABLE):
    """Evaluate t(s) for s > 0.  Accepts a float or an ndarray.

    The limit at 0+ is 12 and t(s)/(2 s^3) -> 1 from above as s grows.
    """
    arr = _check_positive(s)
    with np.errstate(invalid="ignore", divide="ignore"):
        body = _t_naive(arr) if mode is EvalMode.NAIVE else _t_stable(arr)
    out = np.where(arr < _TAYLOR_CUTOFF, _t_taylor(arr), body)
    if out.ndim == 0:
        return float(out)
    return out


T_AT_ONE = t_fn(1.0)


def theta_scaled(s):
    """theta(s) * e^{-4s}; finite for every s > 0."""
    arr = _check_positive(s)
    u = np.exp(-2.0 * arr)
    omu = -np.expm1(-2.0 * arr)
    s2 = arr * arr
    s3 = s2 * arr
    val = (-s3 * u * u
           + 0.75 * arr * u * omu**2
           + 0.1875 * omu**2 * (omu * (1.0 + u))
           - 0.75 * s2 * u * (omu * (1.0 + u))
           - 0.5 * s3 * u * (1.0 + u)**2)
    if val.ndim == 0:
        return float(val)
    return val


def theta_fn(s):
    """Numerator (up to the positive factor 2s^2/(sinh^2 s - s^2)^2) of t'(s).

    theta grows like (3/16) e^{4s}; past s ~ 177 the value is returned as
    +inf (its sign is still exact, which is what the slope certificate uses).
    """
    arr = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise SpecfunDomainError(f"s must be finite, got {s!r}")
    _check_positive(arr)
    sh = np.sinh(np.minimum(arr, _THETA_SCALED_FROM))
    ch = np.cosh(np.minimum(arr, _THETA_SCALED_FROM))
    x = np.minimum(arr, _THETA_SCALED_FROM)
    direct = (-x**3 + 3.0 * x * sh**2 + 3.0 * sh**3 * ch
              - 3.0 * x**2 * sh * ch - 2.0 * x**3 * ch**2)
    sc = theta_scaled(np.maximum(arr, _THETA_SCALED_FROM))
    with np.errstate(over="ignore"):
        rescaled = np.exp(4.0 * np.maximum(arr, _THETA_SCALED_FROM)) * sc
    out = np.where(arr <= _THETA_SCALED_FROM, direct, rescaled)
    if out.ndim == 0:
        return float(out)
    return out


def t_prime(s):
    """Analytic derivative t'(s) = 2 s^2 theta(s) / (sinh^2 s - s^2)^2, scaled form."""
    arr = _check_positive(s)
    minus, plus = _scaled_pair(arr)
    out = 32.0 * arr * arr * theta_scaled(arr) / (minus * plus) ** 2
    if np.ndim(out) == 0:
        return float(out)
    return out


def _t_branch(s: float) -> float:
    """Scalar stable t(s) for s >= 1 (no series needed there)."""
    em = math.exp(-s)
    om = -math.expm1(-2.0 * s)
    num = -math.expm1(-4.0 * s) + 4.0 * s * em * em
    return 2.0 * s**3 * num / ((om - 2.0 * s * em) * (om + 2.0 * s * em))


def _t_prime_branch(s: float) -> float:
    """Scalar t'(s) for s >= 1."""
    em = math.exp(-s)
    u = em * em
    om = -math.expm1(-2.0 * s)
    s2 = s * s
    s3 = s2 * s
    th = (-s3 * u * u + 0.75 * s * u * om**2 + 0.1875 * om**3 * (1.0 + u)
          - 0.75 * s2 * u * om * (1.0 + u) - 0.5 * s3 * u * (1.0 + u) ** 2)
    den = (om - 2.0 * s * em) * (om + 2.0 * s * em)
    return 32.0 * s2 * th / (den * den)


def h_fn(t: float) -> float:
    """Inverse of t on [1, inf): the s >= 1 with t_fn(s) == t.

    Newton iteration on t(s) - t with the analytic slope, seeded at
    (t/2)^{1/3} and safeguarded by bisection inside a bracket that always
    contains the root because t is increasing there and
    2 s^3 < t(s) <= t(1) s^3.
    """
    t = float(t)
    if not math.isfinite(t):
        raise SpecfunDomainError(f"t must be finite, got {t!r}")
    if t < T_AT_ONE * (1.0 - _T_ONE_SLACK):
        raise SpecfunDomainError(
            f"h is only defined for t >= t(1) = {T_AT_ONE:.17g}, got {t!r}")
    if t <= T_AT_ONE:
        return 1.0

    lo = max(1.0, _cbrt(t / T_AT_ONE))
    hi = max(lo, _cbrt(t / 2.0))
    # widen against rounding at the bracket ends
    while lo > 1.0 and _t_branch(lo) > t:
        lo = max(1.0, lo * (1.0 - 1e-12))
    while _t_branch(hi) < t:
        hi *= 1.0 + 1e-12

    s = min(max(_cbrt(t / 2.0), lo), hi)
    for _ in range(_H_MAXITER):
        f = _t_branch(s) - t
        if f == 0.0:
            return s
        if f < 0.0:
            lo = s
        else:
            hi = s
        step = f / _t_prime_branch(s)
        cand = s - step
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        if abs(cand - s) <= _H_RTOL * s or hi - lo <= _H_RTOL * lo:
            return cand
        s = cand
    raise RuntimeError(f"h_fn did not converge for t={t!r}")
