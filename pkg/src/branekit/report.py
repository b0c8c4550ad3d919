"""Check records and reports.

Every verification operation returns a CheckReport: a flat, ordered list of
named records with a pass/fail status, the worst residual observed, and a
location string (chart / edge / triangle / label ids) so failures can be
pinpointed from the CLI output.
"""

from dataclasses import dataclass, field


@dataclass
class CheckRecord:
    name: str
    passed: bool
    residual: float | None = None
    location: str | None = None
    detail: str | None = None

    def to_dict(self):
        d = {"name": self.name, "status": "pass" if self.passed else "fail"}
        if self.residual is not None:
            d["residual"] = float(self.residual)
        if self.location is not None:
            d["location"] = self.location
        if self.detail is not None:
            d["detail"] = self.detail
        return d


@dataclass
class CheckReport:
    records: list[CheckRecord] = field(default_factory=list)

    def add(self, name, passed, residual=None, location=None, detail=None):
        self.records.append(CheckRecord(name, bool(passed), residual, location, detail))

    def extend(self, other: "CheckReport"):
        self.records.extend(other.records)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def max_residual(self) -> float:
        vals = [r.residual for r in self.records if r.residual is not None]
        return max(vals) if vals else 0.0

    def failures(self):
        return [r for r in self.records if not r.passed]

    def to_dict(self):
        return {"passed": self.passed, "checks": [r.to_dict() for r in self.records]}

    def __str__(self):
        lines = []
        for r in self.records:
            loc = f" @ {r.location}" if r.location else ""
            res = f" residual={r.residual:.3e}" if r.residual is not None else ""
            det = f" ({r.detail})" if r.detail else ""
            lines.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}{loc}{res}{det}")
        return "\n".join(lines)
