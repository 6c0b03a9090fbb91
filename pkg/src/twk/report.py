from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    """Outcome of a structural check; truthy when nothing was violated."""

    violations: list[str] = field(default_factory=list)
    caveats: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, message: str) -> None:
        self.violations.append(message)

    def extend(self, other: "Report", prefix: str = "") -> None:
        self.violations.extend(prefix + v for v in other.violations)
        self.caveats.extend(prefix + c for c in other.caveats)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations), "caveats": list(self.caveats)}
