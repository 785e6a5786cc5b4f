"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the criterion lines are
printed to the terminal even when output capture is on.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from catfix.analysis import (WindowedSequence, asymptotic_center, project_to_segment,
                             projection_angle_check)
from catfix.cli import main
from catfix.geometry import (GeodesicSegment, Space, angle_from_sides, cat_inequality_slack,
                             convexity_modulus, dist, geodesic_point, sample_ball,
                             side_from_angle)
from catfix.orders import (ArcOrder, ConeOrder, check_interp_monotone, validate_A1, validate_A2)
from catfix.schemes import (ArithmeticSchedule, BrowderConfig, KMConfig, browder_run,
                            geometric_lambdas, harmonic_lambdas, km_run, km_schedule_witness,
                            looks_uar, uar_estimate)
from catfix.semigroups import (ArcDrift, Box, DiagonalFlow, ExpansiveFlow, Translation,
                               validate_semigroup)

from startree import WITNESS, StarTreeRootward

N = 10_000
E1, E2 = Space.euclidean(1), Space.euclidean(2)
S2, H2 = Space.sphere(2, 1.0), Space.hyperbolic(2, -1.0)
KINDS = {"euclidean": E2, "sphere": S2, "hyperbolic": H2}
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def verdict(capsys):
    """Print one criterion line outside the capture, then assert on it."""

    def emit(number, title, checks):
        ok = all(passed for passed, _ in checks)
        detail = "; ".join(f"{msg}{'' if passed else ' [FAILED]'}" for passed, msg in checks)
        with capsys.disabled():
            print(f"\ncriterion {number:2d} {'PASS' if ok else 'FAIL'}: {title} :: {detail}")
        assert ok, detail

    return emit


def _ball(space, rng, radius):
    return sample_ball(space, space.basepoint(), radius, rng)


def test_criterion_01_geometry_exactness(verdict):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    checks = []
    for kind, space in KINDS.items():
        radius = 0.45 * space.diameter if kind == "sphere" else 2.0
        worst = 0.0
        for _ in range(N):
            p, q = _ball(space, rng, radius), _ball(space, rng, radius)
            lam = rng.uniform()
            r = geodesic_point(space, p, q, lam)
            d = dist(space, p, q)
            worst = max(worst, abs(dist(space, p, r) - lam * d), abs(dist(space, r, q) - (1 - lam) * d))
        checks.append((worst <= 1e-9, f"{kind} geodesic max err {worst:.2e}"))
    worst = 0.0
    for _ in range(N):
        kappa = float(rng.choice([-1.0, 0.0, 1.0])) * rng.uniform(0.1, 2.0)
        top = math.pi / (2 * math.sqrt(kappa)) if kappa > 0 else 3.0
        a, b = rng.uniform(0.01, top, 2)
        gamma = rng.uniform(0.05, math.pi - 0.05)
        c = side_from_angle(kappa, a, b, gamma)
        worst = max(worst, abs(angle_from_sides(kappa, a, b, c) - gamma),
                    abs(side_from_angle(kappa, a, b, angle_from_sides(kappa, a, b, c)) - c))
    elapsed = time.perf_counter() - start
    checks.append((worst <= 1e-9, f"cosine-law round trip max err {worst:.2e}"))
    checks.append((elapsed < 5.0, f"runtime {elapsed:.2f}s"))
    verdict(1, "geometry exactness", checks)


def _slacks(space, kappa, rng, radius):
    out = np.empty(N)
    for n in range(N):
        p, q, r = (_ball(space, rng, radius) for _ in range(3))
        sides = [dist(space, q, r), dist(space, r, p), dist(space, p, q)]
        i, j = (int(v) for v in rng.integers(0, 3, 2))
        out[n] = cat_inequality_slack(space, kappa, p, q, r, (i, rng.uniform(0, sides[i])),
                                      (j, rng.uniform(0, sides[j])))
    return out


def test_criterion_02_cat_certification(verdict):
    rng = np.random.default_rng(202)
    flat_self = _slacks(E2, 0.0, rng, 2.0)
    # radius pi/12 keeps every side below pi/6 and the perimeter far from 2 pi
    flat_vs_sphere = _slacks(E2, 1.0, rng, math.pi / 12)
    sphere_self = _slacks(S2, 1.0, rng, 1.0)
    verdict(2, "CAT(kappa) certification", [
        (np.abs(flat_self).max() <= 1e-9, f"euclidean vs 0 max |slack| {np.abs(flat_self).max():.2e}"),
        (flat_vs_sphere.min() >= -1e-9, f"euclidean vs 1 min slack {flat_vs_sphere.min():.2e}"),
        (np.abs(sphere_self).max() <= 1e-9, f"sphere vs 1 max |slack| {np.abs(sphere_self).max():.2e}"),
    ])


def test_criterion_03_strong_convexity(verdict):
    rng = np.random.default_rng(303)
    diam = math.pi / 4
    k = convexity_modulus(diam, 1.0)
    center = S2.from_normal([0.3, -0.2])
    worst = math.inf
    for _ in range(N):
        p, x, y = (sample_ball(S2, center, diam / 2, rng) for _ in range(3))
        t = rng.uniform()
        m = geodesic_point(S2, x, y, t)
        lhs = dist(S2, p, m) ** 2
        rhs = (1 - t) * dist(S2, p, x) ** 2 + t * dist(S2, p, y) ** 2 - 0.5 * k * t * (1 - t) * dist(S2, x, y) ** 2
        worst = min(worst, rhs - lhs)
    ulps = (k - math.pi / 2) / math.ulp(math.pi / 2)
    verdict(3, "strong convexity with the convexity modulus", [
        (worst >= -1e-9, f"min slack {worst:.2e}"),
        (k == math.pi / 2, f"k(pi/4) - pi/2 = {ulps:+.0f} ulp"),
    ])


def test_criterion_04_order_axioms(verdict):
    rng = np.random.default_rng(404)
    meridian = ArcOrder(S2, S2.from_normal([math.pi / 3, 0.0]), S2.basepoint())
    checks = []
    for name, order in (("coordinatewise_cone", ConeOrder(E2)), ("arc_order", meridian)):
        a1 = validate_A1(order, n_sequences=100, seed=1)
        a2 = validate_A2(order, n_samples=N, seed=2)
        bad = 0
        for _ in range(N):
            x, y = order.sample_pair(rng)
            lam, eta = sorted(rng.uniform(size=2))
            bad += not check_interp_monotone(order, x, y, lam, eta)
        checks += [(a1.passed(), f"{name} A1 {a1.n_samples} samples"),
                   (a2.passed() and a2.n_samples == N, f"{name} A2 {a2.n_samples} samples"),
                   (bad == 0, f"{name} interpolation monotone violations {bad}")]
    tree = validate_A2(StarTreeRootward(), n_samples=100, seed=0, cases=[WITNESS])
    first = tree.first_counterexample("A2")
    found = first is not None and first.witness["left"] == (2, 0.5) and first.witness["right"] == (1, 0.5)
    checks.append((not tree.passed() and found, "star tree fails A2 with the documented witness"))
    verdict(4, "order axioms", checks)


def test_criterion_05_semigroup_axioms(verdict):
    meridian = ArcOrder(S2, S2.from_normal([math.pi / 3, 0.0]), S2.basepoint())
    ray = ArcOrder(H2, H2.from_normal([2.0, 0.0]), H2.basepoint())
    checks = []
    for name, sg in (("DiagonalFlow", DiagonalFlow(E2, [1.0, 0.5], [0.0, 0.0])),
                     ("ArcDrift sphere", ArcDrift(meridian, 1.0)),
                     ("ArcDrift hyperbolic", ArcDrift(ray, 1.0)),
                     ("Translation", Translation(E1))):
        rep = validate_semigroup(sg, n_samples=2000, seed=5)
        checks.append((rep.passed(), f"{name} S1-S5 {'pass' if rep.passed() else 'fail'}"))
    rep = validate_semigroup(ExpansiveFlow(E1), n_samples=2000, seed=5)
    checks.append((not rep.passed("S5"), "ExpansiveFlow fails S5"))
    trace = km_run(KMConfig(Translation(E1), E1.point([0.0]), 0.5, 1.0, 50, (0.5,), 1e-6))
    low = min(r.residuals[0.5] for r in trace.records)
    checks.append((trace.status == "max_iters", f"Translation KM status {trace.status}"))
    checks.append((low >= 0.5 - 1e-9, f"Translation min residual {low:.17g}"))
    exit_code = main(["run", "--config", str(CONFIGS / "translation_km.yaml"), "--out", "/dev/null"])
    checks.append((exit_code == 3, f"Translation CLI exit {exit_code}"))
    verdict(5, "semigroup axioms", checks)


def test_criterion_06_km_convergence(verdict):
    sg = DiagonalFlow(E1, [1.0], [0.0], Box(E1, [-1.0], [0.0]))
    trace = km_run(KMConfig(sg, E1.point([-1.0]), 0.5, ArithmeticSchedule(1.0), 60, (1.0,), 1e-6))
    x, worst = -1.0, 0.0
    for rec in trace.records:
        worst = max(worst, abs(rec.point.coords[0] - x))
        x *= 0.5 + 0.5 * math.exp(-(rec.k + 1))
    d = [abs(p.coords[0]) for p in trace.points()]
    fejer = all(b <= a for a, b in zip(d, d[1:]))
    _, gap = km_schedule_witness(ArithmeticSchedule(1.0), 3.0, 50)
    verdict(6, "KM convergence", [
        (worst <= 1e-12, f"oracle max err {worst:.2e}"),
        (trace.status == "converged" and trace.last.residuals[1.0] < 1e-6,
         f"residual {trace.last.residuals[1.0]:.2e} after {trace.last.k} iterations"),
        (all(r.monotone_ok for r in trace.records), "monotone flags"),
        (fejer, "d(0, x^k) nonincreasing"),
        (gap == 3, f"schedule witness sup_gap {gap}"),
    ])


def test_criterion_07_km_on_curvature(verdict):
    checks = []
    for name, space, start in (("sphere", S2, math.pi / 3), ("hyperbolic", H2, 2.0)):
        order = ArcOrder(space, space.from_normal([start, 0.0]), space.basepoint())
        trace = km_run(KMConfig(ArcDrift(order, 1.0), order.segment.a, 0.5, 0.1, 200, (0.1, 1.0), 1e-6))
        theta, worst = start, 0.0
        for rec in trace.records:
            worst = max(worst, abs(dist(space, space.basepoint(), rec.point) - theta))
            theta -= 0.5 * min((rec.k + 1) * 0.1, theta)
        end_gap = dist(space, trace.last.point, order.segment.b)
        checks.append((trace.status == "converged" and max(trace.last.residuals.values()) <= 1e-6,
                       f"{name} converged after {trace.last.k} iterations, endpoint gap {end_gap:.1e}"))
        checks.append((worst <= 1e-10, f"{name} recurrence max err {worst:.2e}"))
    verdict(7, "KM on curved spaces", checks)


def test_criterion_08_browder_convergence(verdict):
    inner_tol = 1e-10
    flow = DiagonalFlow(E1, [1.0], [0.0], Box(E1, [-1.0], [0.0]))
    trace = browder_run(BrowderConfig(flow, E1.point([-1.0]), harmonic_lambdas(0.5), 1.0, 20, inner_tol))
    worst = 0.0
    for rec in trace.records:
        lam, t = 0.5 / (rec.k + 1), 2.0**rec.k
        worst = max(worst, abs(rec.point.coords[0] - lam * -1.0 / (1 - (1 - lam) * math.exp(-t))))
    split = DiagonalFlow(E2, [1.0, 0.0], [0.0, 0.0], Box(E2, [-1, -1], [0, 0]))
    x0 = E2.point([-1.0, -1.0])
    run = browder_run(BrowderConfig(split, x0, geometric_lambdas(0.5, 0.5), 1.0, 21, 1e-12))
    x20 = run[20].point
    gap = float(np.linalg.norm(x20.coords - np.array([0.0, -1.0])))
    rng = np.random.default_rng(808)
    fix = split.fixed_set()
    minimal = 0
    for _ in range(100):
        q = fix.sample(rng)
        if split.order.comparable(x0, q):
            minimal += dist(E2, x0, run.last.point) <= dist(E2, x0, q) + 1e-4
    verdict(8, "Browder convergence", [
        (worst <= inner_tol, f"closed form max err {worst:.2e}"),
        (gap <= 1e-4, f"k=20 distance to Fix projection {gap:.2e}"),
        (minimal == 100, f"minimality against {minimal}/100 comparable fixed points"),
        (trace.all_flags_ok() and run.all_flags_ok(), "outer monotone flags"),
    ])


def test_criterion_09_uar_profile(verdict):
    flow = DiagonalFlow(E1, [1.0], [0.0], Box(E1, [-1.0], [0.0]))
    exact = math.exp(-1) * (1 - math.exp(-1))
    (_, v), = uar_estimate(flow, 1.0, [1.0], 1000, seed=9)
    prof = uar_estimate(Translation(E1), 0.5, [1.0, 10.0, 100.0, 1000.0], 200, seed=9)
    const = max(abs(s - 0.5) for _, s in prof)
    verdict(9, "UAR profile", [
        (exact - 0.01 <= v <= exact, f"sampled {v:.6f} vs exact {exact:.6f}"),
        (const <= 1e-12, f"translation profile deviation from h {const:.1e}"),
        (not looks_uar(prof), "translation flagged non-UAR"),
    ])


def test_criterion_10_analysis(verdict):
    checks = []
    pts = [E1.point([float(k % 2)]) for k in range(200)]
    c, tau = asymptotic_center(WindowedSequence.tail(pts))
    grid = np.arange(-1.0, 2.0 + 1e-12, 1e-4)
    radii = np.maximum(np.abs(grid), np.abs(grid - 1))
    err = abs(c.coords[0] - grid[np.argmin(radii)])
    checks.append((err <= 2e-4, f"alternating center off grid argmin by {err:.1e}"))
    rng = np.random.default_rng(1010)
    h = 5e-3
    axis = np.arange(-0.7, 0.7 + 1e-12, h)
    gx, gy = np.meshgrid(axis, axis)
    normal = np.column_stack([gx.ravel(), gy.ravel()])
    for kind, space in KINDS.items():
        G = [space.from_normal(v) for v in normal] if kind != "euclidean" else None
        worst = 0.0
        for _ in range(3):
            window = [_ball(space, rng, 0.5) for _ in range(int(rng.integers(2, 6)))]
            seq = WindowedSequence.tail(window)
            _, tau = asymptotic_center(seq)
            if G is None:
                grid_tau = np.max([np.linalg.norm(normal - p.coords, axis=1) for p in window], axis=0).min()
            else:
                grid_tau = min(seq.radius_from(g) for g in G)
            worst = max(worst, grid_tau - tau, tau - grid_tau)
        checks.append((worst <= 2 * h, f"{kind} window radius vs grid {worst:.1e}"))
    worst, n = math.inf, 0
    while n < 1000:
        space = list(KINDS.values())[n % 3]
        a, b, x = (_ball(space, rng, 0.7) for _ in range(3))
        seg = GeodesicSegment(a, b)
        y = seg.at(rng.uniform())
        foot, hgt = project_to_segment(space, seg, x)
        if hgt < 1e-6 or dist(space, foot, y) < 1e-6:
            continue
        worst = min(worst, projection_angle_check(space, space.kappa, seg, x, y))
        n += 1
    checks.append((worst >= math.pi / 2 - 1e-6, f"min projection angle {worst:.9f} over {n} cases"))
    verdict(10, "asymptotic centers and projections", checks)


def test_criterion_11_determinism(verdict, tmp_path):
    checks = []
    for argv in (["run", "--config", str(CONFIGS / "diagonal_km.yaml")],
                 ["run", "--config", str(CONFIGS / "split_browder.yaml")],
                 ["run", "--config", str(CONFIGS / "arc_drift_sphere.yaml")],
                 ["validate", "--config", str(CONFIGS / "diagonal_km.yaml"), "--seed", "3"],
                 ["validate", "--config", str(CONFIGS / "expansive_validate.yaml")]):
        outs = []
        for i in range(2):
            path = tmp_path / f"out{i}"
            main(argv + ["--out", str(path)])
            outs.append(path.read_bytes())
        checks.append((outs[0] == outs[1], f"{argv[0]} {Path(argv[2]).stem} identical"))
    verdict(11, "determinism", checks)
