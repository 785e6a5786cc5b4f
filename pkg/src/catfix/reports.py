"""Validation reports shared by the order, semigroup and analysis checkers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def fmt(x) -> str:
    """Number formatting used in every report and trace (17 significant digits)."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _fmt_value(v) -> str:
    if hasattr(v, "coords"):
        v = v.coords
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt_value(e) for e in v) + "]"
    if isinstance(v, (int, float, np.floating, np.integer, bool, np.bool_)):
        return fmt(v)
    return str(v)


@dataclass
class Violation:
    check: str
    message: str
    witness: dict = field(default_factory=dict)

    def to_text(self) -> str:
        parts = [f"{k}={_fmt_value(v)}" for k, v in self.witness.items()]
        return f"[{self.check}] {self.message}" + (" :: " + "; ".join(parts) if parts else "")


@dataclass
class ValidationReport:
    """Outcome of a sampled validation, possibly covering several checks.

    ``counts`` maps each check name to the number of samples examined.
    Only the first ``max_witnesses`` violations per check keep their
    witnesses; ``failures`` still counts all of them.
    """

    name: str
    counts: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    max_witnesses: int = 5

    def tally(self, check: str, n: int = 1) -> None:
        self.counts[check] = self.counts.get(check, 0) + n
        self.failures.setdefault(check, 0)

    def fail(self, check: str, message: str, **witness) -> None:
        self.failures[check] = self.failures.get(check, 0) + 1
        self.counts.setdefault(check, 0)
        if sum(v.check == check for v in self.violations) < self.max_witnesses:
            self.violations.append(Violation(check, message, witness))

    def passed(self, check: str | None = None) -> bool:
        if check is None:
            return all(n == 0 for n in self.failures.values())
        return self.failures.get(check, 0) == 0

    @property
    def n_samples(self) -> int:
        return sum(self.counts.values())

    def first_counterexample(self, check: str | None = None):
        for v in self.violations:
            if check is None or v.check == check:
                return v
        return None

    def to_text(self) -> str:
        lines = [f"report: {self.name}", f"status: {'PASS' if self.passed() else 'FAIL'}"]
        for check in sorted(self.counts):
            status = "PASS" if self.passed(check) else "FAIL"
            lines.append(
                f"check {check}: {status} samples={self.counts[check]} violations={self.failures.get(check, 0)}"
            )
        for note in self.notes:
            lines.append(f"note: {note}")
        for v in self.violations:
            lines.append("counterexample " + v.to_text())
        return "\n".join(lines) + "\n"

    def __bool__(self) -> bool:
        return self.passed()
