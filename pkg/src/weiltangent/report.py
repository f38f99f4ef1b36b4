"""Verification reports: per-diagram results with stable ids and JSON form.

Every verifier in the library returns a :class:`VerificationReport`.  A
result whose ``passed`` field is None records a sweep item that was skipped
because its enumeration exceeded the configured budget; skipped items are
reported but are not failures, so budget exhaustion never masquerades as a
refutation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class CheckResult:
    diagram_id: str
    subject: str
    passed: object  # True, False, or None (skipped for budget)
    counterexample: dict | None = None
    note: str | None = None

    def to_json(self):
        out = {
            "diagram_id": self.diagram_id,
            "object": self.subject,
            "pass": self.passed,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.note is not None:
            out["note"] = self.note
        return out


@dataclass
class VerificationReport:
    title: str
    bounds: dict = field(default_factory=dict)
    results: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def record(self, diagram_id, subject, passed, counterexample=None, note=None):
        self.results.append(
            CheckResult(diagram_id, subject, passed, counterexample, note)
        )

    def check(self, diagram_id, subject, lhs, rhs, detail=None):
        """Record an exact equality check; on failure keep both sides as data."""
        ok = lhs == rhs
        counterexample = None
        if not ok:
            counterexample = {
                "lhs": _as_data(lhs),
                "rhs": _as_data(rhs),
            }
            if detail:
                counterexample.update(detail)
        self.record(diagram_id, subject, ok, counterexample)
        return ok

    def skip(self, diagram_id, subject, note):
        self.record(diagram_id, subject, None, note=note)

    def extend(self, other: "VerificationReport"):
        self.results.extend(other.results)
        self.notes.extend(other.notes)

    @property
    def all_pass(self) -> bool:
        return all(r.passed is not False for r in self.results)

    @property
    def failures(self) -> list:
        return [r for r in self.results if r.passed is False]

    @property
    def skipped(self) -> list:
        return [r for r in self.results if r.passed is None]

    def counts(self):
        passed = sum(1 for r in self.results if r.passed is True)
        failed = len(self.failures)
        skipped = len(self.skipped)
        return {"passed": passed, "failed": failed, "skipped": skipped}

    def to_json(self):
        """The per-diagram array, canonically sorted."""
        return [
            r.to_json()
            for r in sorted(self.results, key=lambda r: (r.diagram_id, r.subject))
        ]

    def to_document(self):
        return {
            "title": self.title,
            "bounds": self.bounds,
            "counts": self.counts(),
            "notes": sorted(self.notes),
            "results": self.to_json(),
        }

    def summary_lines(self):
        lines = []
        for r in sorted(self.results, key=lambda r: (r.diagram_id, r.subject)):
            status = {True: "pass", False: "FAIL", None: "skip"}[r.passed]
            lines.append(f"[{status}] {r.diagram_id} @ {r.subject}")
        c = self.counts()
        lines.append(
            f"{self.title}: {c['passed']} passed, {c['failed']} failed, "
            f"{c['skipped']} skipped"
        )
        return lines

    def __str__(self):
        return "\n".join(self.summary_lines())


def _as_data(value):
    to_json = getattr(value, "to_json", None)
    if callable(to_json):
        return to_json()
    return str(value)


def dump_canonical(document) -> str:
    """Deterministic JSON serialization used by every report writer."""
    return json.dumps(document, sort_keys=True, separators=(",", ":")) + "\n"
