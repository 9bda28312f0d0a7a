"""Bound-check records and their CSV serialization."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

CSV_COLUMNS = ("lemma", "check", "params", "bound", "achieved", "slack", "passed", "witness")
CHECK_TOL = 1e-9


def fmt(x: float) -> str:
    """Float formatting used in every CSV cell: 12 significant digits."""
    return f"{x:.12g}"


@dataclass(frozen=True)
class BoundCheck:
    lemma: str
    check: str
    params: str
    bound: float
    achieved: float
    slack: float
    passed: bool
    witness: str = ""

    def row(self) -> list[str]:
        return [
            self.lemma,
            self.check,
            self.params,
            fmt(self.bound),
            fmt(self.achieved),
            fmt(self.slack),
            "pass" if self.passed else "fail",
            self.witness,
        ]


@dataclass
class Report:
    """Collection of bound checks for one lemma instance."""

    lemma: str
    params: str
    checks: list[BoundCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.passed]

    def lower(self, name: str, bound: float, achieved: float, witness: str = "", tol: float = CHECK_TOL):
        """Record ``achieved >= bound``."""
        slack = achieved - bound
        self._add(name, bound, achieved, slack, slack >= -tol, witness)

    def upper(self, name: str, bound: float, achieved: float, witness: str = "", tol: float = CHECK_TOL):
        """Record ``achieved <= bound``."""
        slack = bound - achieved
        self._add(name, bound, achieved, slack, slack >= -tol, witness)

    def _add(self, name, bound, achieved, slack, passed, witness):
        self.checks.append(
            BoundCheck(self.lemma, name, self.params, float(bound), float(achieved),
                       float(slack), bool(passed), witness)
        )

    def extend(self, other: "Report"):
        self.checks.extend(other.checks)

    def __getitem__(self, name: str) -> BoundCheck:
        for c in self.checks:
            if c.check == name:
                return c
        raise KeyError(name)


def to_csv(trial_reports) -> str:
    """CSV text for ``(trial, report)`` pairs, one row per bound check."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("trial",) + CSV_COLUMNS)
    for trial, report in trial_reports:
        for check in report.checks:
            writer.writerow([trial] + check.row())
    return buf.getvalue()
