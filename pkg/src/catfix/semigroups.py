"""Order-preserving semigroups {T_t} and sampled checks of their axioms.

Axioms checked by :func:`validate_semigroup`:

* S1  T_0 is the identity on C
* S2  T_{s+t} = T_s o T_t
* S3  t -> T_t x is continuous (sampled modulus, continuous index sets only)
* S4  x <= y implies T_t x <= T_t y
* S5  d(T_t x, T_t y) <= L d(x, y) for comparable x, y

Plus ``invariance``: T_t maps C into C.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .geometry import Point, Space, dist
from .orders import ArcOrder, ConeOrder, Order
from .reports import ValidationReport

INDEX_TOL = 1e-9
DOMAIN_TOL = 1e-12


@dataclass(frozen=True)
class IndexSet:
    """``continuous`` is [0, inf); ``discrete`` is {0, t0, 2 t0, ...}."""

    kind: str = "continuous"
    t0: float | None = None

    def __post_init__(self):
        if self.kind == "discrete":
            if self.t0 is None or not self.t0 > 0:
                raise DomainError("a discrete index set needs t0 > 0")
        elif self.kind != "continuous":
            raise DomainError(f"unknown index set kind {self.kind!r}")

    @classmethod
    def discrete(cls, t0: float) -> "IndexSet":
        return cls("discrete", float(t0))

    def multiple(self, t: float) -> int | None:
        """``t / t0`` as an integer when ``t`` is on the lattice, else ``None``."""
        n = round(t / self.t0)
        if n >= 0 and abs(t / self.t0 - n) <= INDEX_TOL:
            return int(n)
        return None

    def contains(self, t: float) -> bool:
        if not (t >= 0 and math.isfinite(t)):
            return False
        return self.kind == "continuous" or self.multiple(t) is not None

    def check(self, t: float) -> None:
        if not self.contains(t):
            raise DomainError(f"time {t} is not in the index set {self}")

    def sample(self, rng, t_max: float) -> float:
        if self.kind == "continuous":
            return float(rng.uniform(0.0, t_max))
        # integer multiples only, never accumulated sums
        return int(rng.integers(0, max(int(t_max / self.t0), 1) + 1)) * self.t0


class Box:
    """Coordinate box in a euclidean space (closed under componentwise min/max)."""

    def __init__(self, space: Space, lower, upper):
        if space.kind != "euclidean":
            raise DomainError("box domains live in euclidean spaces")
        self.space = space
        self.lower = np.array(lower, dtype=float).reshape(-1)
        self.upper = np.array(upper, dtype=float).reshape(-1)
        if self.lower.shape != (space.dim,) or self.upper.shape != (space.dim,):
            raise DomainError("box bounds must match the space dimension")
        if np.any(self.lower > self.upper) or not np.all(np.isfinite(self.lower - self.upper)):
            raise DomainError("box bounds must be finite with lower <= upper")

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def contains(self, x: Point) -> bool:
        return bool(np.all(x.coords >= self.lower - DOMAIN_TOL) and np.all(x.coords <= self.upper + DOMAIN_TOL))

    def sample(self, rng) -> Point:
        return Point(rng.uniform(self.lower, self.upper), self.space)

    def __repr__(self):
        return f"Box({self.lower.tolist()}, {self.upper.tolist()})"


class WholeSpace:
    """Unbounded domain; samples are drawn from a ball of ``sample_radius``."""

    def __init__(self, space: Space, sample_radius: float = 1.0):
        self.space = space
        self.sample_radius = sample_radius

    diameter = math.inf

    def contains(self, x: Point) -> bool:
        return x.space == self.space

    def sample(self, rng) -> Point:
        from .geometry import sample_ball

        return sample_ball(self.space, self.space.basepoint(), self.sample_radius, rng)

    def __repr__(self):
        return f"WholeSpace({self.space})"


class SegmentDomain:
    """The geodesic segment carrying an :class:`ArcOrder`."""

    def __init__(self, order: ArcOrder):
        self.order = order
        self.space = order.space
        if self.space.kind == "sphere" and order.length >= self.space.diameter / 2:
            raise DomainError("segment domains on a sphere need length < D_kappa/2")

    @property
    def diameter(self) -> float:
        return self.order.length

    def contains(self, x: Point) -> bool:
        try:
            self.order.coordinate(x)
        except DomainError:
            return False
        return True

    def sample(self, rng) -> Point:
        return self.order.sample_point(rng)

    def __repr__(self):
        return f"SegmentDomain(length={self.order.length:.6g})"


class Semigroup:
    """A family {T_t : t in J} acting on a domain C of an ordered space.

    Subclasses implement :meth:`evaluate` for t > 0 and optionally
    :meth:`fixed_set`.
    """

    name = "semigroup"

    def __init__(self, space: Space, order: Order, index_set: IndexSet, domain,
                 lipschitz: float = 1.0):
        if order.space != space or domain.space != space:
            raise DomainError("order, domain and semigroup must share one space")
        self.space = space
        self.order = order
        self.index_set = index_set
        self.domain = domain
        self.lipschitz = float(lipschitz)

    def evaluate(self, t: float, x: Point) -> Point:
        raise NotImplementedError

    def fixed_set(self) -> "FixDescriptor | None":
        return None

    def __call__(self, t, x):
        return apply(self, t, x)

    def __repr__(self):
        return f"{type(self).__name__}({self.space.kind}({self.space.dim}), {self.domain})"


@dataclass
class FixDescriptor:
    """Analytic description of the common fixed-point set of a shipped instance."""

    kind: str
    contains: object
    sample: object
    project: object = None
    points: list = field(default_factory=list)


class DiagonalFlow(Semigroup):
    """Componentwise relaxation x_i -> exp(-a_i t) x_i + (1 - exp(-a_i t)) c_i.

    Zero rates leave a coordinate untouched, so the fixed set is the affine
    slice {x in C : x_i = c_i wherever a_i > 0}.
    """

    name = "diagonal_flow"

    def __init__(self, space: Space, rates, attractor=None, domain=None, index_set=None):
        rates = np.array(rates, dtype=float).reshape(-1)
        if rates.shape != (space.dim,) or np.any(rates < 0):
            raise DomainError("rates must be nonnegative, one per coordinate")
        c = np.zeros(space.dim) if attractor is None else np.array(attractor, dtype=float).reshape(-1)
        domain = domain or Box(space, -np.ones(space.dim), np.ones(space.dim))
        super().__init__(space, ConeOrder(space), index_set or IndexSet(), domain)
        self.rates = rates
        self.attractor = c
        if not domain.contains(Point(c, space)):
            raise DomainError("the attractor must lie in the domain")

    def evaluate(self, t, x):
        e = np.exp(-self.rates * t)
        return Point(e * x.coords + (1.0 - e) * self.attractor, self.space)

    def fixed_set(self):
        pinned = self.rates > 0
        c = self.attractor
        box = self.domain

        def contains(z):
            return bool(np.all(np.abs(z.coords[pinned] - c[pinned]) <= 1e-10)) and box.contains(z)

        def sample(rng):
            z = box.sample(rng).coords.copy()
            z[pinned] = c[pinned]
            return Point(z, self.space)

        def project(x):
            z = x.coords.copy()
            z[pinned] = c[pinned]
            if isinstance(box, Box):
                z = np.clip(z, box.lower, box.upper)
            return Point(z, self.space)

        return FixDescriptor("affine", contains, sample, project)


class ArcDrift(Semigroup):
    """Drift at constant ``speed`` along an ordered segment, stopping at its end.

    In arc coordinates T_t s = min(s + speed t, L), so the end of the
    segment is the unique fixed point.
    """

    name = "arc_drift"

    def __init__(self, order: ArcOrder, speed: float = 1.0, index_set=None):
        if speed < 0:
            raise DomainError("drift speed must be nonnegative")
        super().__init__(order.space, order, index_set or IndexSet(), SegmentDomain(order))
        self.speed = float(speed)

    def evaluate(self, t, x):
        s = self.order.coordinate(x)
        return self.order.point_at(min(s + self.speed * t, self.order.length))

    def fixed_set(self):
        end = self.order.segment.b
        return FixDescriptor(
            "point",
            lambda z: dist(self.space, z, end) <= 1e-10,
            lambda rng: end,
            lambda x: end,
            points=[end],
        )


class Translation(Semigroup):
    """T_t x = x + t v: an isometric, order-preserving flow without fixed points."""

    name = "translation"

    def __init__(self, space: Space, direction=None, index_set=None, sample_radius: float = 1.0):
        v = np.ones(space.dim) if direction is None else np.array(direction, dtype=float).reshape(-1)
        if np.any(v < 0):
            raise DomainError("translation direction must lie in the positive cone")
        super().__init__(space, ConeOrder(space), index_set or IndexSet(),
                         WholeSpace(space, sample_radius))
        self.direction = v

    def evaluate(self, t, x):
        return Point(x.coords + t * self.direction, self.space)

    def fixed_set(self):
        if np.any(self.direction != 0):
            return FixDescriptor("empty", lambda z: False, None)
        return None


class ExpansiveFlow(Semigroup):
    """T_t x = (1 + t) x; breaks the Lipschitz bound for every t > 0."""

    name = "expansive_flow"

    def __init__(self, space: Space, index_set=None, sample_radius: float = 1.0):
        super().__init__(space, ConeOrder(space), index_set or IndexSet(),
                         WholeSpace(space, sample_radius))

    def evaluate(self, t, x):
        return Point((1.0 + t) * x.coords, self.space)

    def fixed_set(self):
        origin = Point(np.zeros(self.space.dim), self.space)
        return FixDescriptor("point", lambda z: float(np.linalg.norm(z.coords)) <= 1e-10,
                             lambda rng: origin, lambda x: origin, points=[origin])


def apply(sg: Semigroup, t: float, x: Point) -> Point:
    """T_t x, with T_0 the exact identity."""
    sg.index_set.check(t)
    if not sg.domain.contains(x):
        raise DomainError(f"point {x} is outside the semigroup domain")
    if t == 0:
        return x
    return sg.evaluate(t, x)


def residual(sg: Semigroup, s: float, x: Point) -> float:
    """Displacement d(x, T_s x)."""
    return dist(sg.space, x, apply(sg, s, x))


def seed_admissible(sg: Semigroup, x0: Point, t_probe) -> bool:
    """Whether x0 <= T_t x0 for every probed t."""
    return all(sg.order.leq(x0, apply(sg, t, x0)) for t in t_probe)


_DYADIC = (1, 5, 10, 15, 20, 25, 30)


def validate_semigroup(sg: Semigroup, n_samples: int = 10_000, seed: int = 0,
                       t_max: float = 5.0, tol: float = 1e-9) -> ValidationReport:
    """Sampled check of S1-S5 and domain invariance; one counter per axiom."""
    rng = np.random.default_rng(seed)
    J = sg.index_set
    order = sg.order
    space = sg.space
    L = sg.lipschitz
    report = ValidationReport(f"semigroup axioms: {sg.name}")
    if J.kind == "discrete":
        report.notes.append("S3 continuity is vacuous on a discrete index set")
    for _ in range(n_samples):
        x = sg.domain.sample(rng)
        s = J.sample(rng, t_max)
        t = J.sample(rng, t_max)

        report.tally("S1")
        if not np.array_equal(apply(sg, 0.0, x).coords, x.coords):
            report.fail("S1", "T_0 x differs from x", x=x)

        tx = apply(sg, t, x)
        report.tally("invariance")
        if not sg.domain.contains(tx):
            report.fail("invariance", "T_t x left the domain", t=t, x=x, image=tx)
            continue

        # s + t of two lattice points stays on the lattice
        report.tally("S2")
        gap = dist(space, apply(sg, s + t, x), apply(sg, s, tx))
        if gap > tol:
            report.fail("S2", "T_{s+t} x differs from T_s T_t x", s=s, t=t, x=x, gap=gap)

        if J.kind == "continuous":
            report.tally("S3")
            mod = [dist(space, apply(sg, t + 2.0 ** -j, x), tx) for j in _DYADIC]
            if mod[-1] > 1e-6 or mod[-1] > mod[0] + 1e-12:
                report.fail("S3", "orbit displacement does not vanish as delta -> 0", t=t, x=x,
                            modulus=mod)

        a, b = order.order_pair(x, sg.domain.sample(rng))
        ta, tb = apply(sg, t, a), apply(sg, t, b)
        report.tally("S4")
        if not order.leq(ta, tb):
            report.fail("S4", "order not preserved", t=t, x=a, y=b, tx=ta, ty=tb)
        report.tally("S5")
        dxy = dist(space, a, b)
        dt = dist(space, ta, tb)
        if dt > L * dxy + tol:
            report.fail("S5", f"d(T_t x, T_t y) exceeds {L:g} d(x, y)", t=t, x=a, y=b,
                        d_before=dxy, d_after=dt)
    return report


def validate_fixed_set(sg: Semigroup, n_points: int = 10, n_times: int = 100, seed: int = 0,
                       t_max: float = 10.0, tol: float = 1e-10) -> ValidationReport:
    """Residual of described fixed points at sampled times."""
    rng = np.random.default_rng(seed)
    report = ValidationReport(f"fixed set: {sg.name}")
    fix = sg.fixed_set()
    if fix is None or fix.sample is None:
        report.notes.append("no fixed points described")
        return report
    for _ in range(n_points):
        z = fix.sample(rng)
        for _ in range(n_times):
            t = sg.index_set.sample(rng, t_max)
            report.tally("fixed")
            r = residual(sg, t, z)
            if r > tol:
                report.fail("fixed", "described fixed point moves", z=z, t=t, residual=r)
    return report
