"""Named residual checks collected into reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    passed: bool

    def line(self) -> str:
        mark = "ok " if self.passed else "FAIL"
        return f"[{mark}] {self.name:<40s} residual {self.residual:.3e}"


@dataclass
class Report:
    title: str = ""
    checks: list[Check] = field(default_factory=list)
    values: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def add(self, name: str, residual: float, tol: float) -> Check:
        c = Check(name, float(abs(residual)), bool(abs(residual) <= tol))
        self.checks.append(c)
        return c

    def add_flag(self, name: str, ok: bool) -> Check:
        c = Check(name, 0.0 if ok else 1.0, bool(ok))
        self.checks.append(c)
        return c

    def warn(self, message: str) -> None:
        self.warnings.append(message)

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.residual, c.passed))
        self.warnings.extend(other.warnings)
        for k, v in other.values.items():
            self.values[prefix + k] = v

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def require(self, exc_type: type[Exception], context: str = "") -> None:
        bad = self.failures()
        if bad:
            where = f"{context}: " if context else ""
            raise exc_type(f"{where}check '{bad[0].name}' failed "
                           f"(residual {bad[0].residual:.3e})")

    def render(self) -> str:
        out = []
        if self.title:
            out.append(self.title)
        out.extend(c.line() for c in self.checks)
        for k, v in self.values.items():
            out.append(f"       {k} = {v}")
        for w in self.warnings:
            out.append(f"  warning: {w}")
        return "\n".join(out)
