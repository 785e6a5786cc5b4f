"""Explicit (Krasnosel'skii) and implicit (Browder) fixed-point schemes.

Krasnosel'skii: ``x^{k+1} = (1 - lam) x^k + lam T_{t_k} x^k`` along the
arithmetic schedule ``t_k = (k + 1) t0``.

Browder: ``x^k`` is the fixed point of the contraction
``z -> (1 - lam_k) T_{t_k} z + lam_k x^0`` with ``t_k = t0 2^k`` and
``lam_k`` strictly decreasing to 0, computed by Picard iteration.

Here ``(1 - l) p + l q`` denotes the geodesic point at fraction ``l`` from
``p`` to ``q``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, OrderContractError, ScheduleError
from .geometry import Point, dist, geodesic_point
from .semigroups import Semigroup, apply, residual, seed_admissible

log = logging.getLogger(__name__)

# Largest doubling exponent before t_k stops being representable exactly
MAX_DOUBLINGS = 53


@dataclass
class StepRecord:
    k: int
    t: float
    lam: float
    point: Point
    residuals: dict
    step_dist: float
    monotone_ok: bool
    below_image: bool
    schedule_residual: float
    inner_iters: int | None = None

    @property
    def flags_ok(self) -> bool:
        return self.monotone_ok and self.below_image


@dataclass
class IterationTrace:
    """Rows of a scheme run; row ``k`` holds the iterate ``x^k``.

    ``monotone_ok`` on row ``k`` is ``x^{k-1} <= x^k`` (row 0 compares the
    seed with itself for KM and with the anchor x^0 for Browder);
    ``below_image`` is ``x^k <= T_{t_k} x^k``.
    """

    scheme: str
    probes: tuple
    records: list = field(default_factory=list)
    status: str = "running"

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def last(self) -> StepRecord:
        return self.records[-1]

    def points(self) -> list:
        return [r.point for r in self.records]

    def all_flags_ok(self) -> bool:
        return all(r.flags_ok for r in self.records)


@dataclass(frozen=True)
class ArithmeticSchedule:
    """t_k = (k + 1) t0."""

    t0: float

    def __post_init__(self):
        if not self.t0 > 0:
            raise ScheduleError("schedule step t0 must be positive")

    def __call__(self, k: int) -> float:
        return (k + 1) * self.t0


@dataclass
class KMConfig:
    sg: Semigroup
    x0: Point
    lam: float
    schedule: ArithmeticSchedule
    max_iters: int = 1000
    residual_probes: Sequence[float] = (1.0,)
    stop_tol: float = 1e-6

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise DomainError("KM step lam must lie in (0, 1)")
        if self.stop_tol <= 0 or self.max_iters < 1:
            raise DomainError("stop_tol must be positive and max_iters at least 1")
        if not isinstance(self.schedule, ArithmeticSchedule):
            self.schedule = ArithmeticSchedule(float(self.schedule))
        for s in self.residual_probes:
            self.sg.index_set.check(s)
        times = list(self.residual_probes) + [self.schedule(k) for k in range(min(self.max_iters, 16))]
        for t in times:
            self.sg.index_set.check(t)
        if not seed_admissible(self.sg, self.x0, times):
            raise OrderContractError("seed is not admissible: x0 <= T_t x0 fails for a probed t")


def _probe_residuals(sg, probes, x):
    return {s: residual(sg, s, x) for s in probes}


def km_run(cfg: KMConfig) -> IterationTrace:
    """Krasnosel'skii iteration; stops once every probe residual is below ``stop_tol``."""
    sg, order, lam = cfg.sg, cfg.sg.order, cfg.lam
    probes = tuple(cfg.residual_probes)
    trace = IterationTrace("km", probes)
    x, prev, prev_ok = cfg.x0, cfg.x0, True
    for k in range(cfg.max_iters + 1):
        t = cfg.schedule(k)
        tx = apply(sg, t, x)
        res = _probe_residuals(sg, probes, x)
        trace.records.append(StepRecord(
            k=k, t=t, lam=lam, point=x, residuals=res,
            step_dist=dist(sg.space, prev, x),
            monotone_ok=prev_ok,
            below_image=order.leq(x, tx),
            schedule_residual=dist(sg.space, x, tx),
        ))
        if all(r <= cfg.stop_tol for r in res.values()):
            trace.status = "converged"
            return trace
        if k == cfg.max_iters:
            break
        nxt = geodesic_point(sg.space, x, tx, lam)
        prev_ok = order.leq(x, nxt)
        prev, x = x, nxt
    trace.status = "max_iters"
    return trace


def km_schedule_witness(schedule, s: float, K: int):
    """Index map j_k = k + s/t0 with t_{j_k} = s + t_k on the arithmetic schedule.

    Returns ``(j_map, sup_gap)``; raises :class:`ScheduleError` when ``s`` is
    not a nonnegative multiple of ``t0``.
    """
    t0 = schedule.t0 if isinstance(schedule, ArithmeticSchedule) else float(schedule)
    ratio = s / t0
    m = round(ratio)
    if m < 0 or abs(ratio - m) > 1e-9:
        raise ScheduleError(f"probe s={s} is not on the schedule lattice t0={t0}")
    return [k + m for k in range(K)], m


def picard_fixed_point(sg: Semigroup, t: float, lam: float, x0: Point, tol: float,
                       max_iters: int | None = None,
                       callback: Callable[[int, Point, float], None] | None = None):
    """Fixed point of z -> (1 - lam) T_t z + lam x0 by Picard iteration from x0.

    The map is a contraction with constant 1 - lam on ordered pairs, so the
    loop stops when the a posteriori bound ``step (1 - lam) / lam`` drops
    below ``tol``, or at the a priori iteration count for a domain of
    finite diameter. Each iterate must dominate the previous one.

    Returns ``(z, iters)``.
    """
    if not 0 < lam < 1:
        raise DomainError("Picard relaxation lam must lie in (0, 1)")
    space, order = sg.space, sg.order
    diam = sg.domain.diameter
    cap = max_iters
    if cap is None:
        if math.isfinite(diam) and diam > 0:
            cap = max(1, math.ceil(math.log(tol * lam / diam) / math.log1p(-lam)))
        else:
            cap = 1_000_000
    z = x0
    n = 0
    while True:
        nxt = geodesic_point(space, apply(sg, t, z), x0, lam)
        n += 1
        if not order.leq(z, nxt):
            raise OrderContractError(f"Picard iterate {n} does not dominate its predecessor")
        step = dist(space, z, nxt)
        if callback is not None:
            callback(n, nxt, step)
        z = nxt
        if step * (1 - lam) / lam <= tol or n >= cap:
            return z, n


def harmonic_lambdas(lam0: float) -> Callable[[int], float]:
    """lam_k = lam0 / (k + 1)."""
    return lambda k: lam0 / (k + 1)


def geometric_lambdas(lam0: float, ratio: float = 0.5) -> Callable[[int], float]:
    """lam_k = lam0 ratio^k."""
    if not 0 < ratio < 1:
        raise DomainError("geometric ratio must lie in (0, 1)")
    return lambda k: lam0 * ratio**k


@dataclass
class BrowderConfig:
    sg: Semigroup
    x0: Point
    lambdas: Callable[[int], float] | Sequence[float] = field(default_factory=lambda: harmonic_lambdas(0.5))
    t0: float = 1.0
    outer_iters: int = 20
    inner_tol: float = 1e-10
    residual_probes: Sequence[float] = (1.0,)

    def __post_init__(self):
        if self.t0 <= 0:
            raise ScheduleError("t0 must be a positive element of the index set")
        self.sg.index_set.check(self.t0)
        for s in self.residual_probes:
            self.sg.index_set.check(s)
        if self.inner_tol <= 0 or self.outer_iters < 1:
            raise DomainError("inner_tol must be positive and outer_iters at least 1")
        lams = [self.lam(k) for k in range(self.outer_iters)]
        if any(not 0 < l < 1 for l in lams):
            raise DomainError("every lam_k must lie in (0, 1)")
        if any(b >= a for a, b in zip(lams, lams[1:])):
            raise DomainError("lam_k must be strictly decreasing")
        times = [self.t(k) for k in range(min(self.outer_iters, MAX_DOUBLINGS + 1))]
        if not seed_admissible(self.sg, self.x0, list(self.residual_probes) + times):
            raise OrderContractError("seed is not admissible: x0 <= T_t x0 fails for a probed t")

    def lam(self, k: int) -> float:
        if callable(self.lambdas):
            return float(self.lambdas(k))
        return float(self.lambdas[k])

    def t(self, k: int) -> float:
        # exact power-of-two scaling, never repeated doubling of a rounded value
        return math.ldexp(self.t0, k)


def browder_run(cfg: BrowderConfig) -> IterationTrace:
    """Outer Browder iterates, each the Picard fixed point of its contraction.

    The inner tolerance at step k is ``lam_k * inner_tol``. The run stops
    early with status ``schedule_exhausted`` once t_k would exceed
    ``2**53 t0``.
    """
    sg, order, x0 = cfg.sg, cfg.sg.order, cfg.x0
    probes = tuple(cfg.residual_probes)
    trace = IterationTrace("browder", probes)
    prev = x0
    for k in range(cfg.outer_iters):
        if k > MAX_DOUBLINGS:
            trace.status = "schedule_exhausted"
            log.warning("doubling schedule exhausted after %d outer steps", k)
            return trace
        t, lam = cfg.t(k), cfg.lam(k)
        x, iters = picard_fixed_point(sg, t, lam, x0, lam * cfg.inner_tol)
        tx = apply(sg, t, x)
        trace.records.append(StepRecord(
            k=k, t=t, lam=lam, point=x,
            residuals=_probe_residuals(sg, probes, x),
            step_dist=dist(sg.space, prev, x),
            monotone_ok=order.leq(prev, x),
            below_image=order.leq(x, tx),
            schedule_residual=dist(sg.space, x, tx),
            inner_iters=iters,
        ))
        prev = x
    trace.status = "completed"
    return trace


def uar_estimate(sg: Semigroup, h: float, t_grid: Sequence[float], n_points: int = 1000,
                 seed: int = 0) -> list:
    """Sampled sup over the domain of d(T_t y, T_h T_t y), one value per grid time."""
    sg.index_set.check(h)
    t_grid = list(t_grid)
    for t in t_grid:
        sg.index_set.check(t)
    if any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise DomainError("t_grid must be increasing")
    rng = np.random.default_rng(seed)
    ys = [sg.domain.sample(rng) for _ in range(n_points)]
    profile = []
    for t in t_grid:
        sup = 0.0
        for y in ys:
            ty = apply(sg, t, y)
            sup = max(sup, dist(sg.space, ty, apply(sg, h, ty)))
        profile.append((t, sup))
    return profile


def looks_uar(profile, decay: float = 1e-2, atol: float = 1e-12) -> bool:
    """Whether a profile is nonincreasing and has decayed by ``decay`` (or to ``atol``)."""
    values = [v for _, v in profile]
    if any(b > a + atol for a, b in zip(values, values[1:])):
        return False
    return values[-1] <= atol or values[-1] <= decay * values[0]


def ar_fix_check(sg: Semigroup, t_probe: Sequence[float], candidate: Point, tol: float = 1e-8) -> bool:
    """Whether ``candidate`` is fixed by T_t for every probed t."""
    return all(residual(sg, t, candidate) <= tol for t in t_probe)


def _probe_label(s: float) -> str:
    return np.format_float_positional(float(s), trim="-")


def trace_header(trace: IterationTrace) -> list:
    m = trace.records[0].point.space.ambient_dim if trace.records else 0
    return (["k", "t_k", "lambda"] + [f"coord_{i}" for i in range(m)]
            + ["step_dist", "monotone_ok", "inner_iters"]
            + [f"res_{_probe_label(s)}" for s in trace.probes])


def trace_to_csv(trace: IterationTrace) -> str:
    """CSV text of a trace: one row per iterate, floats to 17 significant digits."""
    from .reports import fmt

    lines = [",".join(trace_header(trace))]
    for r in trace.records:
        row = [str(r.k), fmt(r.t), fmt(r.lam)]
        row += [fmt(c) for c in r.point.coords]
        row += [fmt(r.step_dist), fmt(r.flags_ok), "" if r.inner_iters is None else str(r.inner_iters)]
        row += [fmt(r.residuals[s]) for s in trace.probes]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def profile_to_csv(profile) -> str:
    from .reports import fmt

    return "t,sup_residual\n" + "".join(f"{fmt(t)},{fmt(v)}\n" for t, v in profile)
