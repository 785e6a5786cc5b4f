"""Convergence diagnostics: asymptotic centers, segment projections, fixed segments."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError
from .geometry import (GeodesicSegment, Point, Space, angle_from_sides, dist, exp_map,
                       geodesic_point, log_map, tangent_basis, tangent_inner)
from .reports import ValidationReport
from .semigroups import Semigroup, residual

GOLDEN = (math.sqrt(5) - 1) / 2
DEGENERATE = 1e-10


@dataclass(frozen=True)
class WindowedSequence:
    points: tuple
    space: Space

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise DomainError("a window needs at least one point")
        for p in pts:
            if p.space != self.space:
                raise DomainError("window points must share the window's space")
        object.__setattr__(self, "points", pts)

    @classmethod
    def tail(cls, points: Sequence[Point], window: int = 64) -> "WindowedSequence":
        pts = list(points)[-window:]
        if not pts:
            raise DomainError("a window needs at least one point")
        return cls(tuple(pts), pts[0].space)

    def radius_from(self, x: Point) -> float:
        return max(dist(self.space, x, p) for p in self.points)


def asymptotic_center(seq: WindowedSequence, tol: float = 1e-10, max_starts: int = 8):
    """Minimizer of x -> max_i d(x, x_i) over the space, with the attained value.

    The problem is solved in normal coordinates around the best window
    point, as the epigraph program ``min s  s.t.  d(x, x_i)^2 <= s``, restarted
    from several window points.
    """
    space = seq.space
    pts = seq.points
    scored = sorted(range(len(pts)), key=lambda i: seq.radius_from(pts[i]))
    best_point, best_tau = pts[scored[0]], seq.radius_from(pts[scored[0]])
    if best_tau == 0.0:
        return best_point, 0.0
    ref = best_point
    basis = tangent_basis(space, ref)

    def chart(y):
        return exp_map(space, ref, y @ basis)

    def sq_dists(y):
        z = chart(y)
        return np.array([dist(space, z, p) ** 2 for p in pts])

    n = space.dim
    starts = [scored[0]] + [i for i in scored[1:] if i != scored[0]][: max_starts - 1]
    for i in starts:
        y0 = basis @ _tangent_coords(space, log_map(space, ref, pts[i]))
        s0 = float(sq_dists(y0).max())
        res = minimize(
            lambda v: v[-1],
            np.concatenate([y0, [s0]]),
            jac=lambda v: np.concatenate([np.zeros(n), [1.0]]),
            constraints=[{"type": "ineq", "fun": lambda v: v[-1] - sq_dists(v[:-1])}],
            method="SLSQP",
            options={"ftol": tol * tol, "maxiter": 500},
        )
        z = chart(res.x[:-1])
        tau = seq.radius_from(z)
        if tau < best_tau:
            best_point, best_tau = z, tau
    if space.kind == "sphere" and best_tau >= space.diameter / 2:
        raise DomainError("window is too spread for a unique asymptotic center (tau >= D_kappa/2)")
    return best_point, best_tau


def _tangent_coords(space, v):
    # ambient tangent vector -> the metric's dual pairing used by tangent_basis
    if space.kind == "hyperbolic":
        w = v.copy()
        w[0] = -w[0]
        return w
    return v


def center_drift(points: Sequence[Point], window: int = 64, stride: int = 8, tol: float = 1e-10) -> list:
    """Distances between asymptotic centers of successive tail windows."""
    pts = list(points)
    centers = []
    for end in range(window, len(pts) + 1, stride):
        c, _ = asymptotic_center(WindowedSequence(tuple(pts[end - window:end]), pts[0].space), tol)
        centers.append(c)
    if not centers:
        return []
    space = pts[0].space
    return [dist(space, a, b) for a, b in zip(centers, centers[1:])]


def _slope(space, seg, lam, x):
    """Sign-carrying derivative of d(x, seg(lam)) with respect to lam."""
    g = seg.at(lam)
    to_x = log_map(space, g, x)
    if lam < 1.0:
        along = log_map(space, g, seg.b)
    else:
        along = -log_map(space, g, seg.a)
    return -tangent_inner(space, to_x, along)


def project_to_segment(space: Space, seg: GeodesicSegment, x: Point, tol: float = 1e-12):
    """Nearest point of ``seg`` to ``x`` and the distance to it.

    Distance to ``x`` is convex along the segment, so a golden-section
    search brackets the minimizer; the bracket is then refined by bisection
    on the sign of the derivative, which stays reliable where the distance
    itself is too flat to compare.
    """
    if seg.a.space != space or x.space != space:
        raise DomainError("segment and point must live in the given space")
    L = seg.length
    if L == 0.0:
        return seg.a, dist(space, seg.a, x)

    def f(lam):
        return dist(space, x, seg.at(lam))

    lo, hi = 0.0, 1.0
    c, d = hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > 1e-6:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = f(d)
    lo, hi = max(0.0, lo - 1e-6), min(1.0, hi + 1e-6)
    s_lo, s_hi = _slope(space, seg, lo, x), _slope(space, seg, hi, x)
    if s_lo >= 0:
        lam = lo
    elif s_hi <= 0:
        lam = hi
    else:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _slope(space, seg, mid, x) < 0:
                lo = mid
            else:
                hi = mid
        lam = 0.5 * (lo + hi)
    candidates = [(f(lam), lam)]
    if lam <= 1e-6:
        candidates.append((f(0.0), 0.0))
    if lam >= 1 - 1e-6:
        candidates.append((f(1.0), 1.0))
    dmin, lam = min(candidates)
    if space.kind == "sphere" and dmin >= space.diameter / 2:
        raise DomainError("point is too far from the segment for a unique projection")
    return seg.at(lam), dmin


def projection_angle_check(space: Space, kappa: float, seg: GeodesicSegment, x: Point, y: Point) -> float:
    """Comparison angle at the foot of ``x`` between the directions to ``x`` and ``y``.

    For a convex set this angle is at least pi/2.
    """
    foot, h = project_to_segment(space, seg, x)
    b = dist(space, foot, y)
    # below this the projection's own accuracy swamps the side length
    if h <= DEGENERATE:
        raise DomainError("x lies on the segment; the angle is undefined")
    if b <= DEGENERATE:
        raise DomainError("y coincides with the projection; the angle is undefined")
    return angle_from_sides(kappa, h, b, dist(space, x, y))


def fix_segment_check(sg: Semigroup, z1: Point, z2: Point, n_interp: int = 100,
                      t_probe: Sequence[float] = (1.0,), tol: float = 1e-8) -> ValidationReport:
    """Check that the geodesic between two comparable fixed points is fixed too."""
    for name, z in (("z1", z1), ("z2", z2)):
        bad = [t for t in t_probe if residual(sg, t, z) > 1e-10]
        if bad:
            raise DomainError(f"precondition failed: {name} is not fixed (T_t moves it for t={bad[0]})")
    if not sg.order.comparable(z1, z2):
        raise DomainError("precondition failed: z1 and z2 are not comparable")
    report = ValidationReport("fixed segment")
    for lam in np.linspace(0.0, 1.0, n_interp):
        z = geodesic_point(sg.space, z1, z2, float(lam))
        for t in t_probe:
            report.tally("segment")
            r = residual(sg, t, z)
            if r > tol:
                report.fail("segment", "interpolant is not fixed", lam=float(lam), t=t, residual=r)
    return report
