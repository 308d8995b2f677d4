"""Closed-form biharmonic Steklov eigenpairs on a rectangular box.

The box is D = [0, l_1] x ... x [0, l_n]; the Steklov face is the base
x_n = 0 and the top x_n = l_n is clamped.  Two lateral conditions admit
separated solutions u = X(x_1..x_{n-1}) Y(x_n):

* ``LATERAL_DIRICHLET``: u = Lap u = 0 on the side faces, X a product of
  sines, modes m_i >= 1.
* ``LATERAL_FREE``: du/dnu = d(Lap u)/dnu = 0 on the side faces, X a
  product of cosines, modes m_i >= 0 with sum(m) >= 1.

In both cases lambda^3 = t(eta l_n) / (rho l_n)^3 with
eta^2 = sum (m_i pi / l_i)^2.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .specfun import _scaled_pair, t_fn

__all__ = [
    "SpectrumDomainError",
    "ProblemVariant",
    "BoxDomain",
    "SteklovProblem",
    "SteklovMode",
    "ResidualReport",
    "is_admissible",
    "mode_frequency",
    "eigenvalue_cubed",
    "steklov_mode",
    "profile_Y",
    "profile_Z",
    "profile_derivatives",
    "eigenfunction_eval",
    "boundary_residuals",
    "steklov_residual",
    "neumann_to_steklov",
]


class SpectrumDomainError(ValueError):
    pass


class ProblemVariant(Enum):
    LATERAL_DIRICHLET = "lateral-dirichlet"
    LATERAL_FREE = "lateral-free"

    @classmethod
    def parse(cls, name: str | "ProblemVariant") -> "ProblemVariant":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        for v in cls:
            if v.value == key:
                return v
        raise SpectrumDomainError(
            f"unknown variant {name!r}; expected one of {[v.value for v in cls]}")


@dataclass(frozen=True)
class BoxDomain:
    """Box [0, l_1] x ... x [0, l_n] with the last side the tallest."""

    sides: tuple[float, ...]

    def __post_init__(self):
        sides = tuple(float(x) for x in self.sides)
        object.__setattr__(self, "sides", sides)
        if len(sides) < 2:
            raise SpectrumDomainError("a box needs at least 2 sides")
        if not all(math.isfinite(x) and x > 0.0 for x in sides):
            raise SpectrumDomainError(f"side lengths must be positive, got {sides}")
        if any(x > sides[-1] for x in sides[:-1]):
            # keeps every admissible eta*l_n >= pi, inside t's monotone range
            raise SpectrumDomainError(
                f"lateral sides must not exceed the height l_n={sides[-1]}, got {sides}")

    @property
    def dim(self) -> int:
        return len(self.sides)

    @property
    def height(self) -> float:
        return self.sides[-1]

    @property
    def lateral(self) -> tuple[float, ...]:
        return self.sides[:-1]

    @property
    def base_area(self) -> float:
        return math.prod(self.lateral)


@dataclass(frozen=True)
class SteklovProblem:
    box: BoxDomain
    variant: ProblemVariant = ProblemVariant.LATERAL_DIRICHLET
    rho: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "variant", ProblemVariant.parse(self.variant))
        rho = float(self.rho)
        # rho == 0 is accepted: the face then carries no mass and every count is 0
        if not math.isfinite(rho) or rho < 0.0:
            raise SpectrumDomainError(f"rho must be non-negative, got {self.rho!r}")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_config(cls, cfg: dict) -> "SteklovProblem":
        sides = tuple(cfg["sides"])
        if "dim" in cfg and int(cfg["dim"]) != len(sides):
            raise SpectrumDomainError(
                f"dim={cfg['dim']} does not match {len(sides)} sides")
        return cls(BoxDomain(sides), ProblemVariant.parse(cfg.get("variant", "lateral-dirichlet")),
                   float(cfg.get("rho", 1.0)))

    def to_config(self) -> dict:
        return {"dim": self.box.dim, "sides": list(self.box.sides),
                "variant": self.variant.value, "rho": self.rho}


@dataclass(frozen=True)
class SteklovMode:
    problem: SteklovProblem
    mode: tuple[int, ...]
    freq: float
    lambda_cubed: float

    @property
    def lam(self) -> float:
        return float(np.cbrt(self.lambda_cubed))


@dataclass
class ResidualReport:
    """Scaled residuals of every boundary condition and of the profile ODE.

    ``steklov`` is the base-face condition d(Lap u)/dx_n - lambda^3 rho^3 u = 0
    scaled by lambda^3 rho^3 max|u|; the remaining entries in ``conditions``
    are scaled by eta^k max|u| with k the derivative order.
    """

    steklov: float
    conditions: dict[str, float] = field(default_factory=dict)

    @property
    def worst(self) -> float:
        return max([self.steklov, *self.conditions.values()])


def is_admissible(variant: ProblemVariant, mode: Sequence[int]) -> bool:
    m = tuple(mode)
    if any(int(k) != k or k < 0 for k in m):
        return False
    if ProblemVariant.parse(variant) is ProblemVariant.LATERAL_DIRICHLET:
        return all(k >= 1 for k in m)
    return sum(m) >= 1


def _check_mode(problem: SteklovProblem, mode) -> tuple[int, ...]:
    m = tuple(int(k) for k in mode)
    if len(m) != problem.box.dim - 1:
        raise SpectrumDomainError(
            f"mode needs {problem.box.dim - 1} entries for a {problem.box.dim}-d box, got {m}")
    if not is_admissible(problem.variant, m):
        raise SpectrumDomainError(f"mode {m} is not admissible for {problem.variant.value}")
    return m


def mode_frequency(box: BoxDomain, mode: Sequence[int]) -> float:
    """sqrt(sum (m_i pi / l_i)^2)."""
    m = tuple(mode)
    if len(m) != box.dim - 1:
        raise SpectrumDomainError(f"mode length {len(m)} != {box.dim - 1}")
    if any(k < 0 for k in m) or sum(m) < 1:
        raise SpectrumDomainError(f"mode {m} has no positive entry")
    return math.pi * math.hypot(*(k / l for k, l in zip(m, box.lateral)))


def eigenvalue_cubed(problem: SteklovProblem, mode: Sequence[int]) -> float:
    m = _check_mode(problem, mode)
    if problem.rho <= 0.0:
        raise SpectrumDomainError("eigenvalues require rho > 0")
    ln = problem.box.height
    return t_fn(mode_frequency(problem.box, m) * ln) / (problem.rho * ln) ** 3


def steklov_mode(problem: SteklovProblem, mode: Sequence[int]) -> SteklovMode:
    m = _check_mode(problem, mode)
    return SteklovMode(problem, m, mode_frequency(problem.box, m), eigenvalue_cubed(problem, m))


# ---------------------------------------------------------------- profile

def _profile_coeffs(eta: float, l_n: float):
    """Coefficients of Y = e^{eta(x-l_n)}(p0 + p1 x) + e^{-eta x}(q0 + q1 x).

    Algebraically identical to the cosh/sinh/x cosh/x sinh form with
    Y(0) = 1, Y'(0) = 0, Y(l_n) = Y'(l_n) = 0, but with every coefficient
    pre-divided by the growing exponential so nothing overflows.
    """
    if not (eta > 0.0 and l_n > 0.0 and math.isfinite(eta * l_n)):
        raise SpectrumDomainError(f"need eta > 0 and l_n > 0, got eta={eta!r}, l_n={l_n!r}")
    a = eta * l_n
    u = math.exp(-2.0 * a)
    ea = math.exp(-a)
    minus, plus = _scaled_pair(np.float64(a))
    dn = float(minus * plus)  # 4 e^{-2a} (sinh^2 a - a^2)
    half = 0.5 * (-math.expm1(-2.0 * a))
    p0 = -2.0 * ea * (half + a + a * a) / dn
    p1 = 2.0 * ea * eta * (half + a) / dn
    q = ((1.0 - u) * (1.0 + u) + 4.0 * a * u) / dn
    q0 = 0.5 * (1.0 + q)
    q1 = eta * (2.0 * half + 2.0 * a * u) / dn
    return p0, p1, q0, q1


def _check_height(x, l_n):
    x = np.asarray(x, dtype=float)
    tol = 1e-12 * l_n
    if np.any(~np.isfinite(x)) or np.any(x < -tol) or np.any(x > l_n + tol):
        raise SpectrumDomainError(f"x_n must lie in [0, {l_n}]")
    return np.clip(x, 0.0, l_n)


def _profile(eta: float, l_n: float, x_n, order: int):
    x = _check_height(x_n, l_n)
    p0, p1, q0, q1 = _profile_coeffs(float(eta), float(l_n))
    j = order
    grow = np.exp(eta * (x - l_n))
    decay = np.exp(-eta * x)
    # d^j/dx^j [e^{kx}(c0 + c1 x)] = e^{kx} (k^j (c0 + c1 x) + j k^{j-1} c1)
    up = eta**j * (p0 + p1 * x) + (j * eta ** (j - 1) * p1 if j else 0.0)
    k = -eta
    down = k**j * (q0 + q1 * x) + (j * k ** (j - 1) * q1 if j else 0.0)
    out = grow * up + decay * down
    if out.ndim == 0:
        return float(out)
    return out


def profile_derivatives(eta: float, l_n: float, x_n, order: int):
    """Exact ``order``-th derivative (1..4) of the clamped-top profile Y."""
    if order not in (1, 2, 3, 4):
        raise SpectrumDomainError(f"derivative order must be in 1..4, got {order!r}")
    return _profile(eta, l_n, x_n, order)


def profile_Y(eta: float, l_n: float, x_n):
    """Profile with Y(0) = 1, Y'(0) = 0, Y(l_n) = Y'(l_n) = 0 solving
    Y'''' - 2 eta^2 Y'' + eta^4 Y = 0."""
    return _profile(eta, l_n, x_n, 0)


def profile_Z(beta: float, l_n: float, x_n):
    """Profile of the lateral-free problem; same closed form as ``profile_Y``."""
    return _profile(beta, l_n, x_n, 0)


# ------------------------------------------------------- eigenfunction

def _lateral_factor(problem: SteklovProblem, mode, pts, diff_axis=None):
    """X (or dX/dx_i for i = diff_axis) at points of shape (..., n-1)."""
    pts = np.asarray(pts, dtype=float)
    free = problem.variant is ProblemVariant.LATERAL_FREE
    out = np.ones(pts.shape[:-1])
    for i, (m, l) in enumerate(zip(mode, problem.box.lateral)):
        k = m * math.pi / l
        arg = k * pts[..., i]
        if i == diff_axis:
            out = out * (-k * np.sin(arg) if free else k * np.cos(arg))
        else:
            out = out * (np.cos(arg) if free else np.sin(arg))
    return out


def eigenfunction_eval(problem: SteklovProblem, mode: Sequence[int], x):
    """u(x) = X(x_1..x_{n-1}) Y(x_n) with unit normalisation constant.

    ``x`` may be one point (length n) or an array of points (..., n).
    """
    m = _check_mode(problem, mode)
    pts = np.asarray(x, dtype=float)
    if pts.shape[-1] != problem.box.dim:
        raise SpectrumDomainError(f"points must have {problem.box.dim} coordinates")
    sides = np.asarray(problem.box.sides)
    tol = 1e-12 * sides
    if np.any(pts < -tol) or np.any(pts > sides + tol):
        raise SpectrumDomainError("point lies outside the box")
    eta = mode_frequency(problem.box, m)
    val = _lateral_factor(problem, m, pts[..., :-1]) * profile_Y(eta, problem.box.height, pts[..., -1])
    if np.ndim(val) == 0:
        return float(val)
    return val


def _face_grid(lengths: Sequence[float], per_axis: int) -> np.ndarray:
    """Uniform tensor grid over a (possibly 0-d) face plus its centre."""
    if not lengths:
        return np.zeros((1, 0))
    axes = [np.linspace(0.0, l, per_axis) for l in lengths]
    grid = np.array(list(itertools.product(*axes)))
    centre = np.array([[0.5 * l for l in lengths]])
    return np.vstack([grid, centre])


def boundary_residuals(problem: SteklovProblem, mode: Sequence[int],
                       per_axis: int = 11) -> ResidualReport:
    """Check the profile ODE and every boundary condition of the variant on
    sampled points, using analytic derivatives only."""
    m = _check_mode(problem, mode)
    if problem.rho <= 0.0:
        raise SpectrumDomainError("residuals require rho > 0")
    box = problem.box
    ln = box.height
    eta = mode_frequency(box, m)
    lam3rho3 = eigenvalue_cubed(problem, m) * problem.rho**3

    def dY(x, j):
        return _profile(eta, ln, x, j)

    base = _face_grid(box.lateral, per_axis)
    xs = np.linspace(0.0, ln, per_axis)
    X_base = _lateral_factor(problem, m, base)
    # sup|X| = 1 for sine/cosine products; sampling could alias onto zeros
    umax = max(1.0, float(np.max(np.abs(dY(xs, 0)))))

    res = {}
    ode = dY(xs, 4) - 2 * eta**2 * dY(xs, 2) + eta**4 * dY(xs, 0)
    res["biharmonic"] = float(np.max(np.abs(ode))) / (eta**4 * umax)
    res["base_neumann"] = abs(dY(0.0, 1)) / (eta * umax)
    res["top_value"] = abs(dY(ln, 0)) / umax
    res["top_neumann"] = abs(dY(ln, 1)) / (eta * umax)

    # side faces x_i = 0 and x_i = l_i for i < n, sampled jointly with x_n
    lap_profile = dY(xs, 2) - eta**2 * dY(xs, 0)
    worst_a = worst_b = 0.0
    for i, li in enumerate(box.lateral):
        others = [l for j, l in enumerate(box.lateral) if j != i]
        sub = _face_grid(others, per_axis)
        for edge in (0.0, li):
            pts = np.insert(sub, i, edge, axis=1)
            if problem.variant is ProblemVariant.LATERAL_DIRICHLET:
                Xf = _lateral_factor(problem, m, pts)
                a = np.abs(np.outer(Xf, dY(xs, 0))) / umax
                b = np.abs(np.outer(Xf, lap_profile)) / (eta**2 * umax)
            else:
                dXf = _lateral_factor(problem, m, pts, diff_axis=i)
                a = np.abs(np.outer(dXf, dY(xs, 0))) / (eta * umax)
                b = np.abs(np.outer(dXf, lap_profile)) / (eta**3 * umax)
            worst_a = max(worst_a, float(a.max()))
            worst_b = max(worst_b, float(b.max()))
    if problem.variant is ProblemVariant.LATERAL_DIRICHLET:
        res["side_value"], res["side_laplacian"] = worst_a, worst_b
    else:
        res["side_neumann"], res["side_laplacian_flux"] = worst_a, worst_b

    # base face: d(Lap u)/dx_n = X (Y''' - eta^2 Y') at x_n = 0, u = X Y(0)
    flux = X_base * (dY(0.0, 3) - eta**2 * dY(0.0, 1))
    u0 = X_base * dY(0.0, 0)
    stek = float(np.max(np.abs(flux - lam3rho3 * u0))) / (lam3rho3 * umax)
    return ResidualReport(steklov=stek, conditions=res)


def steklov_residual(problem: SteklovProblem, mode: Sequence[int]) -> ResidualReport:
    return boundary_residuals(problem, mode)


def neumann_to_steklov(alpha: float, l_n: float, rho: float) -> float:
    """Steklov eigenvalue cubed of the cylinder over a base whose Neumann
    eigenvalue (squared frequency) is ``alpha``: t(l_n sqrt(alpha)) / (rho l_n)^3.
    """
    if not (alpha > 0.0 and l_n > 0.0 and rho > 0.0):
        raise SpectrumDomainError("alpha, l_n and rho must be positive")
    s = l_n * math.sqrt(alpha)
    if s < 1.0:
        raise SpectrumDomainError(
            f"l_n*sqrt(alpha) = {s!r} is below the monotone range [1, inf)")
    return t_fn(s) / (rho * l_n) ** 3
