"""Batch experiment runner.

Usage::

    catfix validate --config exp.yaml [--seed N] [--out report.txt]
    catfix run      --config exp.yaml [--seed N] [--out trace.csv] [--skip-validate]
    catfix uar      --config exp.yaml [--seed N] [--out profile.csv]

Exit codes: 0 success, 1 validation failure or order-contract error,
2 configuration error, 3 KM run hit max_iters before reaching stop_tol.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, DomainError, OrderContractError
from .geometry import Space
from .orders import ArcOrder, ConeOrder, EqualityOrder, validate_A1, validate_A2
from .reports import ValidationReport
from .schemes import (ArithmeticSchedule, BrowderConfig, KMConfig, browder_run, geometric_lambdas,
                      harmonic_lambdas, km_run, looks_uar, profile_to_csv, trace_to_csv,
                      uar_estimate)
from .semigroups import (ArcDrift, Box, DiagonalFlow, ExpansiveFlow, IndexSet, Semigroup,
                         SegmentDomain, Translation, WholeSpace, seed_admissible,
                         validate_semigroup)

log = logging.getLogger("catfix")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_MAXITER = 0, 1, 2, 3


@dataclass
class ExperimentConfig:
    space: Space
    order: object
    semigroup: Semigroup
    scheme: dict
    probes: list
    seed: int = 0
    output: str | None = None
    validate: dict = field(default_factory=dict)
    uar: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


class _Section:
    """Dict wrapper that reports missing or malformed fields by dotted path."""

    def __init__(self, data, path):
        if not isinstance(data, dict):
            raise ConfigError(f"{path or 'config'}: expected a mapping")
        self.data = data
        self.path = path

    def _where(self, key):
        return f"{self.path}.{key}" if self.path else key

    def section(self, key, required=True):
        if key not in self.data:
            if required:
                raise ConfigError(f"{self._where(key)}: missing section")
            return _Section({}, self._where(key))
        return _Section(self.data[key], self._where(key))

    def get(self, key, kind=None, default=..., length=None):
        if key not in self.data:
            if default is ...:
                raise ConfigError(f"{self._where(key)}: missing field")
            return default
        value = self.data[key]
        try:
            if kind == "float":
                return float(value)
            if kind == "int":
                if isinstance(value, bool) or int(value) != value:
                    raise ValueError
                return int(value)
            if kind == "str":
                if not isinstance(value, str):
                    raise ValueError
                return value
            if kind == "floats":
                if not isinstance(value, list):
                    raise ValueError
                out = [float(v) for v in value]
                if length is not None and len(out) != length:
                    raise ConfigError(f"{self._where(key)}: expected {length} numbers, got {len(out)}")
                return out
        except (TypeError, ValueError):
            raise ConfigError(f"{self._where(key)}: expected {kind}, got {value!r}") from None
        return value


def _build_space(sec: _Section) -> Space:
    kind = sec.get("kind", "str")
    dim = sec.get("dim", "int")
    if kind == "euclidean":
        kappa = sec.get("kappa", "float", 0.0)
    else:
        kappa = sec.get("kappa", "float", 1.0 if kind == "sphere" else -1.0)
    try:
        return Space(kind, dim, kappa)
    except DomainError as exc:
        raise ConfigError(f"space: {exc}") from None


def _point(space, sec, key):
    return space.from_normal(sec.get(key, "floats", length=space.dim))


def _build_order(space: Space, sec: _Section):
    kind = sec.get("kind", "str")
    if kind in ("coordinatewise_cone", "cone"):
        if space.kind != "euclidean":
            raise ConfigError(f"order.kind: coordinatewise_cone needs a euclidean space, not {space.kind}")
        return ConeOrder(space, sec.get("scale", "float", 1.0))
    if kind in ("arc_order", "arc"):
        try:
            return ArcOrder(space, _point(space, sec, "start"), _point(space, sec, "end"))
        except DomainError as exc:
            raise ConfigError(f"order: {exc}") from None
    if kind == "equality":
        return EqualityOrder(space)
    raise ConfigError(f"order.kind: unknown order {kind!r}")


def _build_index_set(sec: _Section) -> IndexSet:
    kind = sec.get("kind", "str", "continuous")
    if kind == "discrete":
        return IndexSet.discrete(sec.get("t0", "float"))
    if kind != "continuous":
        raise ConfigError(f"{sec.path}.kind: unknown index set {kind!r}")
    return IndexSet()


def _build_domain(space, order, sec: _Section):
    if not sec.data:
        return None
    kind = sec.get("kind", "str")
    if kind == "box":
        return Box(space, sec.get("lower", "floats", length=space.dim),
                   sec.get("upper", "floats", length=space.dim))
    if kind == "whole":
        return WholeSpace(space, sec.get("sample_radius", "float", 1.0))
    if kind == "segment":
        if not isinstance(order, ArcOrder):
            raise ConfigError(f"{sec.path}.kind: segment domains need an arc_order")
        return SegmentDomain(order)
    raise ConfigError(f"{sec.path}.kind: unknown domain {kind!r}")


def _build_semigroup(space, order, sec: _Section) -> Semigroup:
    name = sec.get("name", "str")
    params = sec.section("params", required=False)
    index_set = _build_index_set(sec.section("index_set", required=False))
    try:
        domain = _build_domain(space, order, sec.section("domain_C", required=False))
        if name in ("diagonal_flow", "translation", "expansive_flow"):
            if not isinstance(order, ConeOrder):
                raise ConfigError(f"semigroup.name: {name} needs the coordinatewise_cone order")
        if name == "diagonal_flow":
            return DiagonalFlow(space, params.get("rates", "floats", length=space.dim),
                                params.get("attractor", "floats", None, length=space.dim),
                                domain, index_set)
        if name == "translation":
            sg = Translation(space, params.get("direction", "floats", None, length=space.dim), index_set)
        elif name == "expansive_flow":
            sg = ExpansiveFlow(space, index_set)
        elif name == "arc_drift":
            if not isinstance(order, ArcOrder):
                raise ConfigError("semigroup.name: arc_drift needs an arc_order")
            return ArcDrift(order, params.get("speed", "float", 1.0), index_set)
        else:
            raise ConfigError(f"semigroup.name: unknown gallery instance {name!r}")
    except DomainError as exc:
        raise ConfigError(f"semigroup: {exc}") from None
    if domain is not None:
        sg.domain = domain
    return sg


def load_config(path) -> ExperimentConfig:
    """Parse and cross-check a YAML experiment file; raises :class:`ConfigError`."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        raise ConfigError(f"{where}{getattr(exc, 'problem', None) or exc}") from None
    return build_config(data)


def build_config(data) -> ExperimentConfig:
    root = _Section(data, "")
    space = _build_space(root.section("space"))
    order = _build_order(space, root.section("order"))
    sg = _build_semigroup(space, order, root.section("semigroup"))
    probes = root.get("probes", "floats", [1.0])
    for s in probes:
        if not sg.index_set.contains(s):
            raise ConfigError(f"probes: {s} is not in the semigroup index set")
    return ExperimentConfig(
        space=space, order=order, semigroup=sg,
        scheme=root.section("scheme", required=False).data,
        probes=probes,
        seed=root.get("seed", "int", 0),
        output=root.get("output", "str", None),
        validate=root.section("validate", required=False).data,
        uar=root.section("uar", required=False).data,
        raw=data,
    )


def _scheme_x0(cfg: ExperimentConfig):
    sec = _Section(cfg.scheme, "scheme")
    return _point(cfg.space, sec, "x0")


def build_scheme(cfg: ExperimentConfig):
    """KMConfig or BrowderConfig from the ``scheme`` section."""
    sec = _Section(cfg.scheme, "scheme")
    kind = sec.get("kind", "str")
    x0 = _scheme_x0(cfg)
    try:
        if kind == "km":
            return KMConfig(cfg.semigroup, x0, sec.get("lambda", "float"),
                            ArithmeticSchedule(sec.get("t0", "float", 1.0)),
                            sec.get("max_iters", "int", 1000), cfg.probes,
                            sec.get("stop_tol", "float", 1e-6))
        if kind == "browder":
            rule = sec.get("lambda_rule", "str", "harmonic")
            lam0 = sec.get("lambda0", "float", 0.5)
            if rule == "harmonic":
                lambdas = harmonic_lambdas(lam0)
            elif rule == "geometric":
                lambdas = geometric_lambdas(lam0, sec.get("ratio", "float", 0.5))
            else:
                raise ConfigError(f"scheme.lambda_rule: unknown rule {rule!r}")
            return BrowderConfig(cfg.semigroup, x0, lambdas, sec.get("t0", "float", 1.0),
                                 sec.get("outer_iters", "int", 20),
                                 sec.get("inner_tol", "float", 1e-10), cfg.probes)
    except (DomainError,) as exc:
        raise ConfigError(f"scheme: {exc}") from None
    raise ConfigError(f"scheme.kind: expected km or browder, got {kind!r}")


def run_validations(cfg: ExperimentConfig, seed: int) -> list:
    sec = _Section(cfg.validate, "validate")
    n = sec.get("n_samples", "int", 2000)
    n_seq = sec.get("n_sequences", "int", 50)
    reports = [
        validate_A1(cfg.order, n_sequences=n_seq, seed=seed),
        validate_A2(cfg.order, cfg.space, n_samples=n, seed=seed + 1),
        validate_semigroup(cfg.semigroup, n_samples=n, seed=seed + 2),
    ]
    if cfg.scheme.get("x0") is not None:
        x0 = _scheme_x0(cfg)
        rep = ValidationReport("seed admissibility")
        t0 = _Section(cfg.scheme, "scheme").get("t0", "float", 1.0)
        times = list(cfg.probes) + [(k + 1) * t0 for k in range(16)]
        rep.tally("seed", len(times))
        if not seed_admissible(cfg.semigroup, x0, times):
            rep.fail("seed", "x0 <= T_t x0 fails for some probed t", x0=x0)
        reports.append(rep)
    return reports


def _write(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def cmd_validate(cfg: ExperimentConfig, seed: int, out) -> int:
    reports = run_validations(cfg, seed)
    _write("\n".join(r.to_text() for r in reports), out)
    ok = all(r.passed() for r in reports)
    for r in reports:
        if not r.passed():
            log.error("validation failed: %s", r.name)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_run(cfg: ExperimentConfig, seed: int, out, skip_validate: bool = False) -> int:
    if not skip_validate:
        failed = [r for r in run_validations(cfg, seed) if not r.passed()]
        if failed:
            for r in failed:
                log.error("validation failed before run:\n%s", r.to_text())
            return EXIT_FAIL
    try:
        scheme = build_scheme(cfg)
        trace = km_run(scheme) if isinstance(scheme, KMConfig) else browder_run(scheme)
    except OrderContractError as exc:
        log.error("order contract violated: %s", exc)
        return EXIT_FAIL
    _write(trace_to_csv(trace), out)
    log.info("%s run finished with status %s after %d rows", trace.scheme, trace.status, len(trace))
    if trace.status == "max_iters":
        return EXIT_MAXITER
    return EXIT_OK


def cmd_uar(cfg: ExperimentConfig, seed: int, out) -> int:
    sec = _Section(cfg.uar, "uar")
    h = sec.get("h", "float")
    t_grid = sec.get("t_grid", "floats")
    n_points = sec.get("n_points", "int", 1000)
    try:
        profile = uar_estimate(cfg.semigroup, h, t_grid, n_points, seed)
    except DomainError as exc:
        raise ConfigError(f"uar: {exc}") from None
    _write(profile_to_csv(profile), out)
    log.info("profile is %sUAR-consistent", "" if looks_uar(profile) else "not ")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catfix", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("validate", "check order and semigroup axioms"),
                        ("run", "run the configured scheme and write a trace CSV"),
                        ("uar", "estimate the uniform asymptotic regularity profile")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="YAML experiment file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="output path (default: config 'output' or stdout)")
        if name == "run":
            p.add_argument("--skip-validate", action="store_true", help="run without axiom checks")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config)
        seed = cfg.seed if args.seed is None else args.seed
        out = args.out or cfg.output
        if args.command == "validate":
            return cmd_validate(cfg, seed, out)
        if args.command == "run":
            return cmd_run(cfg, seed, out, args.skip_validate)
        return cmd_uar(cfg, seed, out)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
