"""Acceptance criteria 1-9, each at its stated tolerance and time budget.

Every test carries a ``criterion`` marker; tests/conftest.py prints one
PASS/FAIL line per criterion after the run.
"""
import math
import time

import numpy as np
import pytest

from boxsteklov.cli import main
from boxsteklov.counting import bracket_check, count_direct, count_radius
from boxsteklov.specfun import EvalMode, h_fn, t_fn, theta_fn
from boxsteklov.spectrum import (BoxDomain, ProblemVariant, SteklovProblem, boundary_residuals,
                                 eigenvalue_cubed, mode_frequency, profile_derivatives)
from boxsteklov.weyl import (corollary_check, geometric_grid, remainder_report,
                             weyl_constant_biharmonic, weyl_sweep)

from oracles import flux_closed_form_mp

DIR = ProblemVariant.LATERAL_DIRICHLET
FREE = ProblemVariant.LATERAL_FREE
W_SQUARE = 0.25264272409001357789  # 2 / (16^{1/3} pi), mpmath


def problem(sides, variant=DIR, rho=1.0):
    return SteklovProblem(BoxDomain(tuple(sides)), variant, rho)


# ------------------------------------------------------------------ 1

@pytest.mark.criterion(1, "special functions: round trip, monotonicity, theta > 0, stable vs naive, asymptote")
def test_c1_special_functions():
    start = time.perf_counter()
    s = np.round(np.arange(100, 10001) * 0.01, 12)  # 0.01-step grid on [1, 100]
    t = t_fn(s)
    back = np.array([h_fn(v) for v in t])
    assert np.all(np.abs(back - s) <= 1e-10 * s)
    assert np.all(np.diff(t) > 0.0)
    assert np.all(theta_fn(s) > 0.0)
    wide = np.linspace(0.5, 300.0, 20000)
    naive = t_fn(wide, EvalMode.NAIVE)
    stable = t_fn(wide, EvalMode.STABLE)
    assert np.max(np.abs(naive - stable) / stable) <= 1e-12
    assert abs(t_fn(20.0) / (2 * 20.0**3) - 1.0) <= 1e-12
    assert time.perf_counter() - start < 1.0


# ------------------------------------------------------------------ 2

_C2_CASES = [
    ((1.0, 1.0), DIR, [(1,), (2,), (5,), (12,), (40,)]),
    ((0.7, 1.0), FREE, [(1,), (3,), (7,), (15,), (30,)]),
    ((1.0, 1.0, 1.0), DIR, [(1, 1), (1, 2), (3, 2), (5, 7), (10, 1)]),
    ((0.6, 0.9, 1.2), FREE, [(0, 1), (1, 0), (2, 3), (0, 6), (8, 5)]),
    ((0.5, 0.8, 0.9, 1.0), DIR, [(1, 1, 1), (2, 1, 3), (1, 4, 1), (3, 3, 3), (6, 2, 5)]),
    ((1.0, 1.0, 1.0, 1.0), FREE, [(0, 0, 1), (1, 0, 1), (2, 2, 0), (0, 5, 3), (4, 1, 7)]),
]


@pytest.mark.criterion(2, "eigenfunction residuals <= 1e-8 for 30 modes, Y'''(0) closed form to 1e-10")
def test_c2_eigenfunction_residuals():
    start = time.perf_counter()
    worst, checked = 0.0, 0
    for sides, variant, modes in _C2_CASES:
        p = problem(sides, variant)
        for mode in modes:
            rep = boundary_residuals(p, mode)
            assert rep.worst <= 1e-8, (sides, variant, mode, rep.conditions, rep.steklov)
            worst = max(worst, rep.worst)
            eta, ln = mode_frequency(p.box, mode), p.box.height
            ref = float(flux_closed_form_mp(eta, ln))
            assert abs(profile_derivatives(eta, ln, 0.0, 3) - ref) <= 1e-10 * abs(ref)
            checked += 1
    assert checked == 30
    assert time.perf_counter() - start < 5.0


# ------------------------------------------------------------------ 3

_C3_CONFIGS = [((0.8, 1.0), 2000.0), ((0.7, 0.9, 1.0), 200.0), ((0.6, 0.8, 0.9, 1.0), 40.0)]


@pytest.mark.criterion(3, "count_direct == count_radius, 500 tau x 6 configurations")
def test_c3_counting_equivalence():
    start = time.perf_counter()
    configs = 0
    for sides, tmax in _C3_CONFIGS:
        for variant in (DIR, FREE):
            p = problem(sides, variant)
            for tau in np.geomspace(1.0, tmax, 500):
                assert count_direct(p, tau) == count_radius(p, tau), (sides, variant, tau)
            configs += 1
    assert configs == 6
    assert time.perf_counter() - start < 10.0


# ------------------------------------------------------------------ 4

@pytest.mark.criterion(4, "bracket V <= A^f + 1 <= V + sqrt(n-1) T at every grid tau with radius >= 1")
def test_c4_bracket():
    start = time.perf_counter()
    applicable = 0
    for sides, tmax in [((1.0, 1.0), 1000.0), ((0.7, 1.0), 1000.0),
                        ((1.0, 1.0, 1.0), 150.0), ((0.6, 0.8, 1.0), 150.0)]:
        p = problem(sides, FREE)
        for tau in geometric_grid(1.0, tmax, 60):
            rep = bracket_check(p, tau)
            if rep.radius is not None and rep.radius >= 1.0:
                assert rep.applicable
                assert rep.holds, (sides, tau, rep)
                applicable += 1
    assert applicable > 300
    assert time.perf_counter() - start < 10.0


# ------------------------------------------------------------------ 5

_C5_ELAPSED: list = []


@pytest.mark.criterion(5, "Weyl convergence: n=2 at tau=1000, n=3 at tau=200, variant agreement")
def test_c5_square_tau_1000(record_property):
    start = time.perf_counter()
    row = weyl_sweep(problem((1.0, 1.0)), [1000.0]).rows[0]
    gap = abs(row.ratio - W_SQUARE) / W_SQUARE
    record_property("note", f"n=2 tau=1000: count {row.count}, relative gap {gap:.4f} (tol 0.02)")
    assert gap <= 0.02
    _C5_ELAPSED.append(time.perf_counter() - start)


@pytest.mark.criterion(5, "Weyl convergence: n=2 at tau=1000, n=3 at tau=200, variant agreement")
@pytest.mark.parametrize("variant", [DIR, FREE], ids=["dirichlet", "free"])
def test_c5_cube_tau_200(variant, record_property):
    start = time.perf_counter()
    sweep = weyl_sweep(problem((1.0, 1.0, 1.0), variant), geometric_grid(5.0, 200.0))
    last = sweep.rows[-1]
    record_property("note", f"n=3 {variant.value} tau=200: count {last.count}, "
                            f"relative gap {last.relative_gap:.4f} (tol 0.05)")
    assert last.tau == pytest.approx(200.0)
    assert last.relative_gap <= 0.05
    _C5_ELAPSED.append(time.perf_counter() - start)


@pytest.mark.criterion(5, "Weyl convergence: n=2 at tau=1000, n=3 at tau=200, variant agreement")
@pytest.mark.parametrize("sides,tau", [((1.0, 1.0), 1000.0), ((1.0, 1.0, 1.0), 200.0)],
                         ids=["n2-tau1000", "n3-tau200"])
def test_c5_variant_agreement(sides, tau, record_property):
    start = time.perf_counter()
    w = weyl_constant_biharmonic(problem(sides))
    r_dir = weyl_sweep(problem(sides, DIR), [tau]).rows[0]
    r_free = weyl_sweep(problem(sides, FREE), [tau]).rows[0]
    gap = abs(r_free.ratio - r_dir.ratio) / w
    _C5_ELAPSED.append(time.perf_counter() - start)
    record_property("note", f"n={len(sides)} tau={tau:g}: A0={r_dir.count}, Af={r_free.count}, "
                            f"inter-variant gap {gap:.4f} (tol 0.02)")
    assert gap <= 0.02


@pytest.mark.criterion(5, "Weyl convergence: n=2 at tau=1000, n=3 at tau=200, variant agreement")
def test_c5_runtime():
    assert len(_C5_ELAPSED) == 5
    assert sum(_C5_ELAPSED) < 60.0


# ------------------------------------------------------------------ 6

@pytest.mark.criterion(6, "remainder: n=2 scaled remainder <= 2 on [10, 2000]; n=3 slope reported")
def test_c6_remainder(record_property):
    rep2 = remainder_report(problem((1.0, 1.0)), geometric_grid(10.0, 2000.0))
    record_property("note", f"n=2: max scaled remainder {rep2.max_scaled_remainder:.4f} (bound 2), "
                            f"slope {rep2.slope_fit:.3f}")
    for variant in (DIR, FREE):
        rep3 = remainder_report(problem((1.0, 1.0, 1.0), variant), geometric_grid(5.0, 200.0))
        record_property("note", f"n=3 {variant.value}: log-log slope {rep3.slope_fit:.3f} "
                                f"(reported; reference 1.3)")
    assert rep2.max_scaled_remainder <= 2.0


# ------------------------------------------------------------------ 7

@pytest.mark.criterion(7, "lambda_k / predicted within 2% at k=1000 for the unit square")
def test_c7_corollary(record_property):
    rows = corollary_check(problem((1.0, 1.0)), 1000)
    record_property("note", f"k=1000: ratio {rows[-1].ratio:.15f}")
    assert rows[-1].k == 1000
    assert 0.98 <= rows[-1].ratio <= 1.02


# ------------------------------------------------------------------ 8

@pytest.mark.criterion(8, "rho scaling: lambda(rho) = lambda(1)/rho, A(tau; rho) = A(rho tau; 1)")
def test_c8_rho_scaling():
    rhos = [0.3, 0.5, 1.7, 2.0, 3.7]
    for sides, variant, modes in _C2_CASES:
        for v in (DIR, FREE):
            base = problem(sides, v)
            for mode in modes:
                if v is DIR and 0 in mode:
                    continue
                lam1 = eigenvalue_cubed(base, mode) ** (1 / 3)
                for rho in rhos:
                    lam = eigenvalue_cubed(problem(sides, v, rho), mode) ** (1 / 3)
                    assert abs(lam - lam1 / rho) <= 1e-12 * lam1 / rho
    for sides, tmax in [((1.0, 1.0), 300.0), ((0.7, 0.9, 1.0), 60.0), ((0.6, 0.8, 0.9, 1.0), 20.0)]:
        for v in (DIR, FREE):
            for rho in rhos:
                p = problem(sides, v, rho)
                unit = problem(sides, v)
                for tau in np.geomspace(1.0, tmax / rho, 40):
                    ref = count_direct(unit, rho * tau)
                    assert count_direct(p, tau) == ref
                    assert count_radius(p, tau) == ref


# ------------------------------------------------------------------ 9

_C9_COMMANDS = [
    ["eigen", "--sides", "1,1", "--k", "20"],
    ["eigen", "--sides", "1,1,1", "--variant", "lateral-free", "--k", "60"],
    ["verify", "--sides", "0.8,0.9,1", "--variant", "lateral-free", "--k", "12"],
    ["count", "--sides", "1,1,1", "--variant", "lateral-free", "--tau-min", "1", "--tau-max", "150"],
    ["weyl", "--sides", "1,1,1", "--variant", "lateral-dirichlet", "--tau-min", "5", "--tau-max", "200"],
    ["remainder", "--sides", "1,1", "--tau-min", "10", "--tau-max", "2000"],
    ["tfun", "--s", "0.25,1,2.5,10,40,300"],
]


@pytest.mark.criterion(9, "CLI output byte-identical across runs and STEKLOV_WEYL_THREADS in {1, 4}")
def test_c9_determinism(tmp_path, monkeypatch, capsys):
    for i, argv in enumerate(_C9_COMMANDS):
        for fmt in ("csv", "json"):
            outputs = []
            for threads in ("1", "4", "1", "4"):
                monkeypatch.setenv("STEKLOV_WEYL_THREADS", threads)
                # same path every time: the JSON meta echoes it
                path = tmp_path / f"{i}.{fmt}"
                if path.exists():
                    path.unlink()
                code = main(argv + ["--format", fmt, "--output", str(path)])
                err = capsys.readouterr().err
                assert code == 0, (argv, err)
                outputs.append((path.read_bytes(), err))
            assert all(o == outputs[0] for o in outputs[1:]), argv
