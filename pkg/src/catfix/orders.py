"""Decidable partial orders on model spaces and the CAT-compatibility checks.

An order is *compatible* with the geodesic structure when

* (A1) every upper interval ``[u, ->)`` is closed, checked here in its
  sequential form: the limit of a nondecreasing sequence dominates all terms;
* (A2) geodesic interpolation preserves order: ``a <= b`` and ``c <= d``
  imply ``(1-l)a + l c <= (1-l)b + l d`` (with ``+`` the geodesic sum).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import ConfigError, DomainError
from .geometry import GeodesicSegment, Point, Space, dist, geodesic_point
from .reports import ValidationReport

ORDER_TOL = 1e-12
ARC_TOL = 1e-9


class Order:
    """Base class; subclasses define :meth:`leq` and the sampling hooks."""

    kind = "abstract"

    def __init__(self, space):
        self.space = space

    def leq(self, x, y) -> bool:
        raise NotImplementedError

    def comparable(self, x, y) -> bool:
        return self.leq(x, y) or self.leq(y, x)

    def order_pair(self, x, y):
        """Turn two points into an ordered pair (lower, upper) built from them.

        Used by the samplers; for the cone order this is the componentwise
        (min, max), which stays inside any coordinate box.
        """
        raise NotImplementedError

    def sample_point(self, rng):
        raise NotImplementedError

    def sample_pair(self, rng):
        return self.order_pair(self.sample_point(rng), self.sample_point(rng))

    def monotone_sequence(self, rng, length: int = 64):
        """A nondecreasing sequence converging (in floating point) to its last term."""
        raise NotImplementedError

    def interpolate(self, a, b, lam):
        return geodesic_point(self.space, a, b, lam)

    def __repr__(self):
        return f"{type(self).__name__}({self.space})"


class ConeOrder(Order):
    """Coordinatewise order on R^n: ``x <= y`` iff ``y - x`` lies in the positive orthant."""

    kind = "coordinatewise_cone"

    def __init__(self, space: Space, scale: float = 1.0):
        if space.kind != "euclidean":
            raise DomainError("the coordinatewise cone order needs a euclidean space")
        super().__init__(space)
        self.scale = scale

    def leq(self, x: Point, y: Point) -> bool:
        if x.space != self.space or y.space != self.space:
            raise DomainError("point does not belong to the ordered space")
        return bool(np.all(x.coords <= y.coords + ORDER_TOL))

    def order_pair(self, x, y):
        lo = np.minimum(x.coords, y.coords)
        hi = np.maximum(x.coords, y.coords)
        return Point(lo, self.space), Point(hi, self.space)

    def sample_point(self, rng):
        return Point(rng.uniform(-self.scale, self.scale, self.space.dim), self.space)

    def monotone_sequence(self, rng, length=64):
        limit = rng.uniform(-self.scale, self.scale, self.space.dim)
        u = rng.uniform(0, self.scale, self.space.dim)
        return [Point(limit - 2.0 ** (-k) * u, self.space) for k in range(length)]


class ArcOrder(Order):
    """Total order along a geodesic segment, increasing from ``start`` to ``end``.

    Points must lie on the segment; the arc coordinate is the distance from
    ``start``.
    """

    kind = "arc_order"

    def __init__(self, space: Space, start: Point, end: Point):
        super().__init__(space)
        if space.kind == "sphere" and dist(space, start, end) >= space.diameter:
            raise DomainError("arc orders on a sphere need a segment shorter than D_kappa")
        self.segment = GeodesicSegment(start, end)
        self.length = self.segment.length
        if self.length == 0:
            raise DomainError("arc order needs a nondegenerate segment")

    def coordinate(self, x: Point) -> float:
        if x.space != self.space:
            raise DomainError("point does not belong to the ordered space")
        s = dist(self.space, self.segment.a, x)
        foot = self.segment.at(min(s / self.length, 1.0))
        if s > self.length + ARC_TOL or dist(self.space, foot, x) > ARC_TOL:
            raise DomainError("point is not on the ordered arc")
        return s

    def point_at(self, s: float) -> Point:
        return self.segment.at_offset(min(max(s, 0.0), self.length))

    def leq(self, x, y) -> bool:
        return self.coordinate(x) <= self.coordinate(y) + ORDER_TOL

    def order_pair(self, x, y):
        return (x, y) if self.leq(x, y) else (y, x)

    def sample_point(self, rng):
        return self.point_at(rng.uniform(0, self.length))

    def monotone_sequence(self, rng, length=64):
        s_lim = rng.uniform(0, self.length)
        gap = rng.uniform(0, s_lim)
        return [self.point_at(s_lim - 2.0 ** (-k) * gap) for k in range(length)]


class EqualityOrder(Order):
    """The trivial order: ``x <= y`` iff ``x == y``."""

    kind = "equality"

    def leq(self, x, y) -> bool:
        return dist(self.space, x, y) <= ORDER_TOL

    def order_pair(self, x, y):
        return x, x

    def sample_point(self, rng):
        from .geometry import sample_ball

        radius = 1.0 if self.space.kind != "sphere" else 0.25 * self.space.diameter
        return sample_ball(self.space, self.space.basepoint(), radius, rng)

    def monotone_sequence(self, rng, length=64):
        return [self.sample_point(rng)] * length


@dataclass(frozen=True)
class OrderInterval:
    """The upper interval ``[lower, ->)`` of an order."""

    lower: Point
    order: Order

    def __contains__(self, z) -> bool:
        return self.order.leq(self.lower, z)


def leq(order: Order, x, y) -> bool:
    return order.leq(x, y)


def comparable(order: Order, x, y) -> bool:
    return order.comparable(x, y)


def interval_contains(interval: OrderInterval, z) -> bool:
    return interval.order.leq(interval.lower, z)


def _coords(p):
    return p.coords if hasattr(p, "coords") else p


def validate_A1(order: Order, sampler: Callable | None = None, n_sequences: int = 100,
                seed: int = 0, cauchy_tol: float = 1e-10) -> ValidationReport:
    """Sequential closedness: a nondecreasing convergent sequence lies below its limit.

    ``sampler(rng)`` returns either ``(terms, limit)`` or a plain list, in
    which case the last entry is taken as the limit of the others. The
    terms must be nondecreasing and the last term within ``cauchy_tol`` of
    the limit. Defaults to ``order.monotone_sequence``.
    """
    sampler = sampler or order.monotone_sequence
    rng = np.random.default_rng(seed)
    report = ValidationReport("A1 closed order intervals")
    for _ in range(n_sequences):
        out = sampler(rng)
        if isinstance(out, tuple):
            terms, limit = list(out[0]), out[1]
        else:
            out = list(out)
            terms, limit = out[:-1], out[-1] if out else None
        if not terms:
            raise ConfigError("A1 sampler returned no terms")
        for x, y in zip(terms, terms[1:]):
            if not order.leq(x, y):
                raise ConfigError("A1 sampler produced a sequence that is not nondecreasing")
        if _dist_any(order, terms[-1], limit) > cauchy_tol:
            raise ConfigError("A1 sampler produced a sequence without a detectable limit")
        for k, x in enumerate(terms):
            report.tally("A1")
            if not order.leq(x, limit):
                report.fail("A1", "term is not below the limit", k=k, term=_coords(x), limit=_coords(limit))
    return report


def _dist_any(order, x, y):
    metric = getattr(order, "dist", None)
    if metric is not None:
        return metric(x, y)
    return dist(order.space, x, y)


def validate_A2(order: Order, space=None, n_samples: int = 10_000, seed: int = 0,
                cases: Iterable | None = None) -> ValidationReport:
    """Sampled check that geodesic interpolation of ordered pairs stays ordered.

    ``cases`` optionally lists explicit ``(a, b, c, d, lam)`` quadruples that
    are checked before the random ones.
    """
    if space is not None and space != order.space:
        raise DomainError("order and space disagree")
    rng = np.random.default_rng(seed)
    report = ValidationReport("A2 interpolation compatibility")

    def check(a, b, c, d, lam):
        report.tally("A2")
        left = order.interpolate(a, c, lam)
        right = order.interpolate(b, d, lam)
        if not order.leq(left, right):
            report.fail("A2", "interpolated pair is not ordered", a=_coords(a), b=_coords(b),
                        c=_coords(c), d=_coords(d), lam=lam, left=_coords(left), right=_coords(right))

    for a, b, c, d, lam in cases or ():
        if not (order.leq(a, b) and order.leq(c, d)):
            raise DomainError("explicit A2 case must satisfy a <= b and c <= d")
        check(a, b, c, d, lam)
    for _ in range(n_samples):
        a, b = order.sample_pair(rng)
        c, d = order.sample_pair(rng)
        check(a, b, c, d, rng.uniform())
    return report


def check_interp_monotone(order: Order, a, b, lam: float, eta: float) -> bool:
    """Whether ``(1-lam)a + lam b <= (1-eta)a + eta b`` for ``a <= b`` and ``lam <= eta``."""
    if not order.leq(a, b):
        raise DomainError("check_interp_monotone needs a <= b")
    if not 0.0 <= lam <= eta <= 1.0:
        raise DomainError("check_interp_monotone needs 0 <= lam <= eta <= 1")
    return order.leq(order.interpolate(a, b, lam), order.interpolate(a, b, eta))


def validate_partial_order(order: Order, n_samples: int = 10_000, seed: int = 0) -> ValidationReport:
    """Sampled reflexivity, antisymmetry and transitivity."""
    rng = np.random.default_rng(seed)
    report = ValidationReport("partial order axioms")
    for _ in range(n_samples):
        x = order.sample_point(rng)
        report.tally("reflexive")
        if not order.leq(x, x):
            report.fail("reflexive", "x is not below itself", x=_coords(x))
        y = order.sample_point(rng)
        # half of the pairs are forced comparable so antisymmetry is exercised
        if rng.uniform() < 0.5:
            x, y = order.order_pair(x, y)
        report.tally("antisymmetric")
        if order.leq(x, y) and order.leq(y, x) and _dist_any(order, x, y) > 1e-9:
            report.fail("antisymmetric", "x <= y <= x but x != y", x=_coords(x), y=_coords(y))
        p, q = order.sample_pair(rng)
        _, r = order.order_pair(q, order.sample_point(rng))
        if order.leq(q, r):
            report.tally("transitive")
            if not order.leq(p, r):
                report.fail("transitive", "p <= q <= r but not p <= r",
                            p=_coords(p), q=_coords(q), r=_coords(r))
    return report
