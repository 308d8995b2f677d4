"""Weyl constants and desk-scale checks of the counting asymptotics

    A(tau) ~ w_{n-1} (16^{1/3} pi)^{-(n-1)} |base| rho^{n-1} tau^{n-1}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .counting import count_direct, smallest_modes, unit_ball_volume
from .spectrum import SteklovProblem

__all__ = [
    "unit_ball_volume",
    "weyl_constant_biharmonic",
    "weyl_constant_harmonic",
    "geometric_grid",
    "WeylRow",
    "WeylSweep",
    "weyl_sweep",
    "CorollaryRow",
    "corollary_check",
    "RemainderSummary",
    "remainder_report",
]

CBRT16 = 16.0 ** (1.0 / 3.0)


def _weighted_face(problem: SteklovProblem) -> float:
    d = problem.box.dim - 1
    return problem.box.base_area * problem.rho**d


def weyl_constant_biharmonic(problem: SteklovProblem) -> float:
    """Coefficient of tau^{n-1} in the leading term of A(tau)."""
    d = problem.box.dim - 1
    return unit_ball_volume(d) * (CBRT16 * math.pi) ** (-d) * _weighted_face(problem)


def weyl_constant_harmonic(problem: SteklovProblem) -> float:
    """Second-order Steklov counterpart, w_{n-1} (2 pi)^{-(n-1)} |base| rho^{n-1}.
    Only used for comparison; the ratio to the biharmonic one is 2^{(n-1)/3}."""
    d = problem.box.dim - 1
    return unit_ball_volume(d) * (2.0 * math.pi) ** (-d) * _weighted_face(problem)


def geometric_grid(tau_min: float, tau_max: float, points_per_decade: int = 40) -> np.ndarray:
    if not (0.0 < tau_min < tau_max) or points_per_decade < 1:
        raise ValueError("need 0 < tau_min < tau_max and points_per_decade >= 1")
    n = int(math.ceil(math.log10(tau_max / tau_min) * points_per_decade)) + 1
    return np.geomspace(tau_min, tau_max, max(n, 2))


@dataclass
class WeylRow:
    tau: float
    count: int
    ratio: float
    weyl_constant: float
    relative_gap: float
    remainder: float
    scaled_remainder: float


@dataclass
class WeylSweep:
    rows: list[WeylRow] = field(default_factory=list)
    weyl_constant: float = 0.0

    @property
    def taus(self) -> np.ndarray:
        return np.array([r.tau for r in self.rows])

    @property
    def counts(self) -> np.ndarray:
        return np.array([r.count for r in self.rows])


def _check_grid(tau_grid) -> list[float]:
    taus = [float(t) for t in tau_grid]
    if not taus:
        raise ValueError("tau grid is empty")
    if any(not (t > 0.0 and math.isfinite(t)) for t in taus):
        raise ValueError("tau values must be positive and finite")
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("tau grid must be strictly increasing")
    return taus


def weyl_sweep(problem: SteklovProblem, tau_grid: Sequence[float],
               workers: Optional[int] = None) -> WeylSweep:
    taus = _check_grid(tau_grid)
    w = weyl_constant_biharmonic(problem)
    d = problem.box.dim - 1
    rows = []
    for tau in taus:
        c = count_direct(problem, tau, workers)
        ratio = c / tau**d
        if w > 0.0:
            gap = abs(ratio - w) / w
        else:
            gap = 0.0 if c == 0 else math.inf
        rem = c - w * tau**d
        rows.append(WeylRow(tau, c, ratio, w, gap, rem, rem / tau ** (d - 1)))
    return WeylSweep(rows, w)


@dataclass
class CorollaryRow:
    k: int
    lambda_k: float
    predicted: float
    ratio: float


def corollary_check(problem: SteklovProblem, k_max: int,
                    workers: Optional[int] = None) -> list[CorollaryRow]:
    """lambda_k against 16^{1/3} pi (k / (w_{n-1} |base| rho^{n-1}))^{1/(n-1)}.

    The face model has no zero modes, so k is used where the full-boundary
    statement has k + 2.
    """
    d = problem.box.dim - 1
    denom = unit_ball_volume(d) * _weighted_face(problem)
    modes = smallest_modes(problem, k_max, workers)
    out = []
    for k, m in enumerate(modes, start=1):
        pred = CBRT16 * math.pi * (k / denom) ** (1.0 / d)
        out.append(CorollaryRow(k, m.lam, pred, m.lam / pred))
    return out


@dataclass
class RemainderSummary:
    max_scaled_remainder: float
    slope_fit: float
    sweep: WeylSweep


def remainder_report(problem: SteklovProblem, tau_grid: Sequence[float],
                     workers: Optional[int] = None) -> RemainderSummary:
    """Max of |A - W tau^{n-1}| / tau^{n-2} over the grid and the least-squares
    slope of log|A - W tau^{n-1}| against log tau (zero remainders skipped).

    Purely descriptive: a finite grid cannot certify an O(tau^{n-2}) bound.
    """
    sweep = weyl_sweep(problem, tau_grid, workers)
    scaled = np.array([abs(r.scaled_remainder) for r in sweep.rows])
    rem = np.array([abs(r.remainder) for r in sweep.rows])
    taus = sweep.taus
    nz = rem > 0.0
    if np.count_nonzero(nz) >= 2:
        slope = float(np.polyfit(np.log(taus[nz]), np.log(rem[nz]), 1)[0])
    else:
        slope = math.nan
    return RemainderSummary(float(scaled.max()), slope, sweep)
