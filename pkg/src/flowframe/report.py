"""Check reports shared by the law suites, models and the CLI."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

STATUSES = ("pass", "fail", "undefined", "not_converged", "error")


@dataclass
class Entry:
    name: str
    outcome: str  # "pass" or "fail"
    witness: Any = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "outcome": self.outcome}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class Report:
    """Named pass/fail entries plus free-form data.

    ``status`` is ``pass`` exactly when every entry passes, unless an
    explicit non-check outcome (``undefined`` and friends) was set.
    """

    title: str = ""
    entries: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    outcome: str | None = None
    timing: float = 0.0
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    def check(self, name: str, ok: bool, witness: Any = None) -> bool:
        self.entries.append(Entry(name, "pass" if ok else "fail", None if ok else witness))
        return ok

    def extend(self, other: "Report", prefix: str = ""):
        for e in other.entries:
            self.entries.append(Entry(prefix + e.name, e.outcome, e.witness))

    @property
    def failures(self) -> list:
        return [e for e in self.entries if e.outcome != "pass"]

    @property
    def status(self) -> str:
        if self.outcome is not None:
            return self.outcome
        return "fail" if self.failures else "pass"

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def stop(self) -> "Report":
        self.timing = time.perf_counter() - self._t0
        return self

    def summary(self) -> str:
        n, bad = len(self.entries), len(self.failures)
        return f"{self.title or 'report'}: {self.status} ({n - bad}/{n} checks passed)"

    def to_dict(self, timing: bool = False, all_entries: bool = True) -> dict:
        entries = self.entries if all_entries else self.failures
        d = {"title": self.title, "status": self.status, "checks": len(self.entries),
             "failed": len(self.failures), "entries": [e.to_dict() for e in entries]}
        if self.data:
            d["data"] = self.data
        if timing:
            d["timing"] = self.timing
        return d
