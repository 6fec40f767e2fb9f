"""Check rows and reports shared by the verification routines and the CLI."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction


def digest(descriptor) -> str:
    """Short content hash of a JSON-serialisable descriptor."""
    blob = json.dumps(descriptor, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _residual_value(r):
    if isinstance(r, (Fraction, complex)):
        return float(abs(r))
    return float(r)


@dataclass
class CheckRow:
    check_id: str
    instance_digest: str
    residual: float
    tolerance: float
    passed: bool
    detail: str = ""

    @classmethod
    def make(cls, check_id, instance_digest, residual, tolerance, detail="") -> "CheckRow":
        """Row that passes iff ``residual <= tolerance`` (exact zero for exact checks)."""
        value = _residual_value(residual)
        return cls(check_id, instance_digest, value, tolerance, bool(value <= tolerance), detail)

    def to_dict(self) -> dict:
        out = {
            "check_id": self.check_id,
            "instance_digest": self.instance_digest,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class DualityReport:
    rows: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def summary(self) -> dict:
        n_pass = sum(r.passed for r in self.rows)
        return {"total": len(self.rows), "passed": n_pass, "failed": len(self.rows) - n_pass}

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.rows), default=0.0)

    def add(self, *args, **kwargs) -> CheckRow:
        row = CheckRow.make(*args, **kwargs)
        self.rows.append(row)
        return row

    def extend(self, other: "DualityReport") -> None:
        self.rows.extend(other.rows)

    def sort(self) -> None:
        """Stable order by check id; rows of one check keep instance order."""
        self.rows.sort(key=lambda r: r.check_id)

    def to_dict(self) -> dict:
        out = {
            "pass": self.passed,
            "summary": self.summary,
            "config": self.config,
            "rows": [r.to_dict() for r in self.rows],
        }
        if self.wall_time is not None:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["check_id", "instance_digest", "residual", "tolerance", "pass", "detail"])
        for r in self.rows:
            writer.writerow([r.check_id, r.instance_digest, repr(r.residual), repr(r.tolerance),
                             int(r.passed), r.detail])
        return buf.getvalue()
