from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Outcome of one verifier: overall flag plus per-item mismatches."""

    name: str
    passed: bool
    checked: int = 0
    mismatches: list = field(default_factory=list)
    indeterminate: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "checked": self.checked,
            "mismatches": self.mismatches,
            "indeterminate": self.indeterminate,
            **({"details": self.details} if self.details else {}),
        }

    def line(self) -> str:
        status = "PASS" if self.passed else ("INDETERMINATE" if self.indeterminate else "FAIL")
        return f"{status} {self.name}: {self.checked} checked, {len(self.mismatches)} mismatches"
