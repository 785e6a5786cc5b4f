"""Closed-form geometry of the constant-curvature model spaces.

Three model families are supported:

* ``euclidean``: points are plain vectors in R^n.
* ``sphere``: the sphere of radius 1/sqrt(kappa) embedded in R^{n+1}.
* ``hyperbolic``: the upper sheet of the hyperboloid <x, x> = -1/|kappa| in
  Minkowski space R^{1,n}, time coordinate first.

Curvature values are plain floats throughout. Every trigonometric formula
is written in a half-angle form (haversine style) so that short and
near-degenerate configurations keep full relative precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DomainError, NonUniqueGeodesicError

KINDS = ("euclidean", "sphere", "hyperbolic")

# Inverse-trig arguments within this distance of their domain are clamped.
CLAMP_TOL = 1e-12
POINT_TOL = 1e-12


@dataclass(frozen=True)
class Space:
    kind: str
    dim: int
    kappa: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown space kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.dim}")
        kappa = float(self.kappa)
        if not math.isfinite(kappa):
            raise DomainError("curvature must be finite")
        if self.kind == "euclidean" and kappa != 0.0:
            raise DomainError("euclidean space has kappa = 0")
        if self.kind == "sphere" and kappa <= 0.0:
            raise DomainError("sphere requires kappa > 0")
        if self.kind == "hyperbolic" and kappa >= 0.0:
            raise DomainError("hyperbolic space requires kappa < 0")
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "dim", int(self.dim))

    @classmethod
    def euclidean(cls, dim: int) -> "Space":
        return cls("euclidean", dim, 0.0)

    @classmethod
    def sphere(cls, dim: int, kappa: float = 1.0) -> "Space":
        return cls("sphere", dim, kappa)

    @classmethod
    def hyperbolic(cls, dim: int, kappa: float = -1.0) -> "Space":
        return cls("hyperbolic", dim, kappa)

    @classmethod
    def model(cls, kappa: float, dim: int = 2) -> "Space":
        """The model space M_kappa of the given curvature."""
        if kappa > 0:
            return cls.sphere(dim, kappa)
        if kappa < 0:
            return cls.hyperbolic(dim, kappa)
        return cls.euclidean(dim)

    @property
    def ambient_dim(self) -> int:
        return self.dim if self.kind == "euclidean" else self.dim + 1

    @cached_property
    def radius(self) -> float:
        """Curvature radius 1/sqrt(|kappa|); infinite for the flat case."""
        if self.kind == "euclidean":
            return math.inf
        return 1.0 / math.sqrt(abs(self.kappa))

    @property
    def diameter(self) -> float:
        return model_diameter(self.kappa)

    def basepoint(self) -> "Point":
        x = np.zeros(self.ambient_dim)
        if self.kind != "euclidean":
            x[0] = self.radius
        return Point(x, self)

    def point(self, coords: Sequence[float]) -> "Point":
        """Wrap ambient coordinates, checking that they lie on the model."""
        x = np.array(coords, dtype=float).reshape(-1)
        if x.shape[0] != self.ambient_dim:
            raise DomainError(
                f"{self.kind}({self.dim}) points need {self.ambient_dim} coordinates, got {x.shape[0]}"
            )
        if not np.all(np.isfinite(x)):
            raise DomainError("point coordinates must be finite")
        if self.kind == "sphere":
            if abs(np.linalg.norm(x) - self.radius) > POINT_TOL * max(1.0, self.radius):
                raise DomainError("point is not on the sphere")
        elif self.kind == "hyperbolic":
            r2 = self.radius**2
            scale = max(r2, float(x @ x))
            if abs(minkowski(x, x) + r2) > POINT_TOL * scale or x[0] <= 0:
                raise DomainError("point is not on the upper hyperboloid sheet")
        return Point(x, self)

    def from_normal(self, v: Sequence[float]) -> "Point":
        """Point reached from the basepoint along the tangent vector ``v``.

        ``v`` has ``dim`` entries (normal coordinates at the basepoint); its
        length is the distance travelled.
        """
        v = np.array(v, dtype=float).reshape(-1)
        if v.shape[0] != self.dim:
            raise DomainError(f"normal coordinates need {self.dim} entries")
        if self.kind == "euclidean":
            return Point(v, self)
        return exp_map(self, self.basepoint(), np.concatenate([[0.0], v]))

    def to_normal(self, p: "Point") -> np.ndarray:
        """Inverse of :meth:`from_normal` (for spheres, away from the antipode)."""
        _check_same(self, p)
        if self.kind == "euclidean":
            return p.coords.copy()
        return log_map(self, self.basepoint(), p)[1:]


@dataclass(frozen=True, eq=False)
class Point:
    coords: np.ndarray
    space: Space = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def __repr__(self):
        return f"Point({self.space.kind}, {np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True)
class GeodesicSegment:
    a: Point
    b: Point

    @property
    def space(self) -> Space:
        return self.a.space

    @property
    def length(self) -> float:
        return dist(self.a.space, self.a, self.b)

    def at(self, lam: float) -> Point:
        return geodesic_point(self.a.space, self.a, self.b, lam)

    def at_offset(self, s: float) -> Point:
        L = self.length
        return self.a if L == 0 else geodesic_point(self.a.space, self.a, self.b, s / L)


@dataclass(frozen=True)
class ComparisonTriangle:
    """Triangle in the model plane M_kappa with prescribed side lengths.

    ``sides[i]`` is the side opposite ``vertices[i]``. Side ``i`` runs from
    ``vertices[i+1]`` to ``vertices[i+2]`` (indices mod 3), so side 2 is the
    base from vertex 0 to vertex 1.
    """

    kappa: float
    sides: tuple
    vertices: tuple
    space: Space

    def side_endpoints(self, i: int) -> tuple:
        if i not in (0, 1, 2):
            raise DomainError(f"side index must be 0, 1 or 2, got {i}")
        return self.vertices[(i + 1) % 3], self.vertices[(i + 2) % 3]


def minkowski(x: np.ndarray, y: np.ndarray) -> float:
    return float(-x[0] * y[0] + x[1:] @ y[1:])


def _norm(v: np.ndarray) -> float:
    # same arithmetic as np.linalg.norm for 1-D input, without its dispatch cost
    return math.sqrt(float(v @ v))


def _check_same(space: Space, *points: Point) -> None:
    for p in points:
        if p.space != space:
            raise DomainError(f"point belongs to {p.space}, not {space}")


def _renormalize(space: Space, x: np.ndarray) -> np.ndarray:
    if space.kind == "sphere":
        return x * (space.radius / _norm(x))
    if space.kind == "hyperbolic":
        x = x.copy()
        x[0] = math.sqrt(space.radius**2 + float(x[1:] @ x[1:]))
    return x


def model_diameter(kappa: float) -> float:
    """Diameter of M_kappa: pi/sqrt(kappa) for kappa > 0, infinite otherwise."""
    return math.pi / math.sqrt(kappa) if kappa > 0 else math.inf


def dist(space: Space, p: Point, q: Point) -> float:
    _check_same(space, p, q)
    x, y = p.coords, q.coords
    if space.kind == "euclidean":
        return _norm(x - y)
    R = space.radius
    if space.kind == "sphere":
        return R * 2.0 * math.atan2(_norm(x - y), _norm(x + y))
    # arcosh is accurate far out, the chord form near the diagonal
    c = -minkowski(x, y) / R**2
    if c > 2.0:
        return R * math.acosh(c)
    d = x - y
    chord2 = max(minkowski(d, d), 0.0)
    return R * 2.0 * math.asinh(math.sqrt(chord2) / (2.0 * R))


def tangent_inner(space: Space, u: np.ndarray, v: np.ndarray) -> float:
    if space.kind == "hyperbolic":
        return minkowski(u, v)
    return float(u @ v)


def exp_map(space: Space, p: Point, v: np.ndarray) -> Point:
    """Follow the geodesic from ``p`` with ambient tangent vector ``v``."""
    v = np.asarray(v, dtype=float)
    if space.kind == "euclidean":
        return Point(p.coords + v, space)
    R = space.radius
    n = math.sqrt(max(tangent_inner(space, v, v), 0.0))
    if n == 0.0:
        return p
    th = n / R
    if space.kind == "sphere":
        x = math.cos(th) * p.coords + (R * math.sin(th) / n) * v
    else:
        x = math.cosh(th) * p.coords + (R * math.sinh(th) / n) * v
    return Point(_renormalize(space, x), space)


def log_map(space: Space, p: Point, q: Point) -> np.ndarray:
    """Ambient tangent vector at ``p`` pointing to ``q`` with length dist(p, q)."""
    _check_same(space, p, q)
    if space.kind == "euclidean":
        return q.coords - p.coords
    R = space.radius
    d = dist(space, p, q)
    if d == 0.0:
        return np.zeros(space.ambient_dim)
    if space.kind == "sphere":
        if d >= space.diameter * (1 - 1e-12):
            raise NonUniqueGeodesicError("log map undefined at the antipode")
        u = q.coords - (float(p.coords @ q.coords) / R**2) * p.coords
    else:
        u = q.coords + (minkowski(p.coords, q.coords) / R**2) * p.coords
    un = math.sqrt(max(tangent_inner(space, u, u), 0.0))
    if un == 0.0:
        return np.zeros(space.ambient_dim)
    return (d / un) * u


def tangent_basis(space: Space, p: Point) -> np.ndarray:
    """Orthonormal basis (rows) of the tangent space at ``p``."""
    if space.kind == "euclidean":
        return np.eye(space.dim)
    u = p.coords / space.radius
    s, c = u[1:], u[0]
    sign = -1.0 if space.kind == "sphere" else 1.0
    if space.kind == "hyperbolic" or c > 0.0:
        # image of e_1..e_n under the rotation (sphere) or boost (hyperboloid)
        # that carries the basepoint direction e_0 to u
        basis = np.empty((space.dim, space.ambient_dim))
        basis[:, 0] = sign * s
        basis[:, 1:] = np.eye(space.dim) + sign * np.outer(s, s) / (1.0 + c)
        return basis
    pp = tangent_inner(space, p.coords, p.coords)
    basis = []
    for e in np.eye(space.ambient_dim):
        v = e - (tangent_inner(space, e, p.coords) / pp) * p.coords
        for b in basis:
            v = v - tangent_inner(space, v, b) * b
        n2 = tangent_inner(space, v, v)
        if n2 > 1e-10:
            basis.append(v / math.sqrt(n2))
        if len(basis) == space.dim:
            break
    return np.array(basis)


def geodesic_point(space: Space, p: Point, q: Point, lam: float) -> Point:
    """The point a fraction ``lam`` of the way from ``p`` to ``q``."""
    _check_same(space, p, q)
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"interpolation parameter must lie in [0, 1], got {lam}")
    if space.kind == "euclidean":
        if lam == 0.0:
            return p
        if lam == 1.0:
            return q
        return Point(p.coords + lam * (q.coords - p.coords), space)
    d = dist(space, p, q)
    if space.kind == "sphere" and d >= space.diameter * (1 - 1e-12):
        raise NonUniqueGeodesicError(
            f"points at distance {d} >= {space.diameter} have no unique geodesic"
        )
    if d == 0.0 or lam == 0.0:
        return p
    if lam == 1.0:
        return q
    th = d / space.radius
    if space.kind == "sphere":
        s = math.sin(th)
        x = (math.sin((1 - lam) * th) / s) * p.coords + (math.sin(lam * th) / s) * q.coords
    else:
        s = math.sinh(th)
        x = (math.sinh((1 - lam) * th) / s) * p.coords + (math.sinh(lam * th) / s) * q.coords
    return Point(_renormalize(space, x), space)


# Half-angle building blocks, in unscaled length units so that kappa -> 0
# is continuous: _half2(x) = sin^2(sqrt(kappa) x / 2) / kappa (x^2 / 4 when
# flat, sinh for kappa < 0) and _sfun(x) = sin(sqrt(kappa) x) / sqrt(kappa).
def _sinc(kappa: float, u: float) -> float:
    if u == 0.0 or kappa == 0:
        return 1.0
    if abs(u) < 1e-4:
        return 1.0 - u * u / 6 if kappa > 0 else 1.0 + u * u / 6
    return math.sin(u) / u if kappa > 0 else math.sinh(u) / u


def _half2(kappa: float, x: float) -> float:
    s = math.sqrt(abs(kappa))
    return (x / 2) ** 2 * _sinc(kappa, s * x / 2) ** 2


def _sfun(kappa: float, x: float) -> float:
    return x * _sinc(kappa, math.sqrt(abs(kappa)) * x)


def _atanc(z: float) -> float:
    return 1.0 - z * z / 3 if z < 1e-6 else math.atan(z) / z


def _asinhc(z: float) -> float:
    return 1.0 - z * z / 6 if z < 1e-6 else math.asinh(z) / z


def _check_sides(kappa: float, *sides: float) -> None:
    D = model_diameter(kappa)
    for s in sides:
        if not (s >= 0 and math.isfinite(s)):
            raise DomainError(f"side lengths must be finite and nonnegative, got {s}")
        if s >= D:
            raise DomainError(f"side {s} is not shorter than the model diameter {D}")


def side_from_angle(kappa: float, a: float, b: float, gamma: float) -> float:
    """Length of the side opposite the angle ``gamma`` between sides ``a``, ``b``."""
    _check_sides(kappa, a, b)
    if not 0.0 <= gamma <= math.pi:
        raise DomainError(f"angle must lie in [0, pi], got {gamma}")
    cos2 = math.cos(gamma / 2) ** 2
    sin2 = math.sin(gamma / 2) ** 2
    root = math.sqrt(_half2(kappa, a - b) * cos2 + _half2(kappa, a + b) * sin2)
    if kappa > 0:
        k = math.sqrt(kappa)
        hc = math.cos(k * (a - b) / 2) ** 2 * cos2 + math.cos(k * (a + b) / 2) ** 2 * sin2
        if hc <= 0.0:
            raise DomainError("resulting side reaches the model diameter")
        # c = 2 atan(k root / sqrt(hc)) / k, written to survive tiny kappa
        q = root / math.sqrt(hc)
        c = 2.0 * q * _atanc(k * q)
        if c >= model_diameter(kappa):
            raise DomainError("resulting side reaches the model diameter")
        return c
    if kappa < 0:
        return 2.0 * root * _asinhc(math.sqrt(-kappa) * root)
    return 2.0 * root


def angle_from_sides(kappa: float, a: float, b: float, c: float) -> float:
    """Angle between sides ``a`` and ``b`` of the model triangle with third side ``c``."""
    _check_sides(kappa, a, b, c)
    if a <= 0 or b <= 0:
        raise DomainError("the sides adjacent to the angle must be positive")
    den = _sfun(kappa, a) * _sfun(kappa, b)
    hc = _half2(kappa, c)
    sin2 = (hc - _half2(kappa, a - b)) / den
    cos2 = (_half2(kappa, a + b) - hc) / den
    # cos(gamma) = cos2 - sin2 must lie in [-1, 1] up to the clamp tolerance
    if sin2 < -CLAMP_TOL / 2 or cos2 < -CLAMP_TOL / 2:
        raise DomainError(f"sides ({a}, {b}, {c}) do not form a triangle in M_{kappa}")
    return 2.0 * math.atan2(math.sqrt(max(sin2, 0.0)), math.sqrt(max(cos2, 0.0)))


def build_comparison_triangle(kappa: float, a: float, b: float, c: float) -> ComparisonTriangle:
    """Place a triangle with sides (a, b, c) canonically in M_kappa.

    Vertex 0 sits at the basepoint, vertex 1 along the first tangent
    direction, vertex 2 on the side of positive second coordinate.
    """
    _check_sides(kappa, a, b, c)
    tol = 1e-12 * max(a, b, c, 1.0)
    if a > b + c + tol or b > a + c + tol or c > a + b + tol:
        raise DomainError(f"sides ({a}, {b}, {c}) violate the triangle inequality")
    if kappa > 0 and a + b + c >= 2 * model_diameter(kappa):
        raise DomainError("perimeter must be below twice the model diameter")
    space = Space.model(kappa, 2)
    if b > 0 and c > 0:
        alpha = angle_from_sides(kappa, b, c, a)
    else:
        alpha = 0.0
    v0 = space.basepoint()
    v1 = space.from_normal([c, 0.0])
    v2 = space.from_normal([b * math.cos(alpha), b * math.sin(alpha)])
    return ComparisonTriangle(float(kappa), (a, b, c), (v0, v1, v2), space)


def comparison_point(tri: ComparisonTriangle, side_index: int, offset: float) -> Point:
    """Point at arclength ``offset`` along side ``side_index`` of ``tri``."""
    start, end = tri.side_endpoints(side_index)
    L = tri.sides[side_index]
    if offset < -1e-12 * max(L, 1.0) or offset > L + 1e-12 * max(L, 1.0):
        raise DomainError(f"offset {offset} outside [0, {L}]")
    if L == 0:
        return start
    return geodesic_point(tri.space, start, end, min(max(offset / L, 0.0), 1.0))


def _triangle_side_point(space, verts, spec):
    i, off = spec
    start, end = verts[(i + 1) % 3], verts[(i + 2) % 3]
    L = dist(space, start, end)
    if off < -1e-12 * max(L, 1.0) or off > L + 1e-12 * max(L, 1.0):
        raise DomainError(f"offset {off} outside [0, {L}]")
    return start if L == 0 else geodesic_point(space, start, end, min(max(off / L, 0.0), 1.0))


def cat_inequality_slack(space: Space, kappa: float, p: Point, q: Point, r: Point,
                         u_spec: tuple, v_spec: tuple) -> float:
    """d_kappa(u', v') - d(u, v) for points u, v on the triangle (p, q, r).

    ``u_spec`` and ``v_spec`` are ``(side_index, offset)`` pairs using the
    labelling of :class:`ComparisonTriangle` (side 0 is q->r, 1 is r->p,
    2 is p->q). The slack is nonnegative whenever ``space`` is CAT(kappa).
    """
    verts = (p, q, r)
    a, b, c = dist(space, q, r), dist(space, r, p), dist(space, p, q)
    tri = build_comparison_triangle(kappa, a, b, c)
    u = _triangle_side_point(space, verts, u_spec)
    v = _triangle_side_point(space, verts, v_spec)
    ub = comparison_point(tri, u_spec[0], u_spec[1])
    vb = comparison_point(tri, v_spec[0], v_spec[1])
    return dist(tri.space, ub, vb) - dist(space, u, v)


def convexity_modulus(diam: float, kappa: float) -> float:
    """Modulus k in (0, 2) of the strong convexity inequality for d^2.

    Lengths are rescaled by sqrt(kappa) so the formula is evaluated on the
    unit sphere: k = 2 delta tan(pi/2 - delta), delta = sqrt(kappa) diam.
    It is evaluated as 2 delta / tan(delta), which avoids the cancellation in
    pi/2 - delta and stays accurate as delta -> 0. The quotient is formed in
    extended precision where the platform has it, so the result is almost
    always correctly rounded (k(pi/4) is exactly the double nearest pi/2).
    """
    if kappa <= 0:
        raise DomainError("the convexity modulus is defined for kappa > 0")
    if not 0 < diam < model_diameter(kappa) / 2:
        raise DomainError(f"diameter {diam} must lie in (0, D_kappa/2)")
    delta = math.sqrt(kappa) * diam
    wide = np.longdouble(delta)
    return float(2 * wide / np.tan(wide))


def sample_ball(space: Space, center: Point, radius: float, rng: np.random.Generator) -> Point:
    """Random point within ``radius`` of ``center``."""
    basis = tangent_basis(space, center)
    u = rng.normal(size=space.dim)
    u /= np.linalg.norm(u)
    r = radius * rng.uniform()
    return exp_map(space, center, r * (u @ basis))
