"""Verdicts and run reports."""

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Verdict:
    """Outcome of one quantitative check, with the exact tolerance it used.

    ``relation`` is ``"<="`` (measured must not exceed the tolerance) or
    ``">="`` (measured must reach it, e.g. a convergence order).
    """

    name: str
    measured: float
    tolerance: float
    relation: str = "<="
    detail: str = ""

    @property
    def passed(self):
        m = float(self.measured)
        if math.isnan(m):
            return False
        return m <= self.tolerance if self.relation == "<=" else m >= self.tolerance

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        extra = f" {self.detail}" if self.detail else ""
        return f"[{tag}] {self.name}: measured={self.measured:.6g} ({self.relation} {self.tolerance:.3g}){extra}"

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "measured": float(self.measured),
                "tolerance": self.tolerance, "relation": self.relation, "detail": self.detail}


def at_most(name, measured, tol, detail=""):
    return Verdict(name, float(measured), tol, "<=", detail)


def at_least(name, measured, tol, detail=""):
    return Verdict(name, float(measured), tol, ">=", detail)


@dataclass
class RunReport:
    """Result of :func:`thermovar.harness.scenarios.run_scenario`."""

    scenario: str
    config: dict
    verdicts: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)
    files: list = field(default_factory=list)

    @property
    def passed(self):
        return all(v.passed for v in self.verdicts)

    def as_dict(self):
        return {
            "scenario": self.scenario,
            "passed": self.passed,
            "config": self.config,
            "verdicts": [v.as_dict() for v in self.verdicts],
            "summary": self.summary,
            "orders": self.orders,
            "files": self.files,
        }
