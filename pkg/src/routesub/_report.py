from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    seed: int | None
    witness: tuple
    lhs: float
    rhs: float
    note: str = ""


@dataclass
class VerificationReport:
    """Outcome of one property check over a batch of instances.

    ``lhs``/``rhs`` of each violation are the two sides of the inequality that
    failed, so a reader can see by how much it failed.
    """

    name: str
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)
    skipped: list[tuple[int | None, str]] = field(default_factory=list)
    # one row per checked (seed, lhs, rhs) for the CSV dump
    rows: list[tuple[int | None, bool, float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, seed, ok, lhs, rhs, witness=(), note=""):
        self.checked += 1
        self.rows.append((seed, bool(ok), float(lhs), float(rhs)))
        if not ok:
            self.violations.append(Violation(seed, tuple(witness), float(lhs), float(rhs), note))

    def skip(self, seed, reason):
        self.skipped.append((seed, reason))

    def merge(self, other: VerificationReport) -> VerificationReport:
        out = VerificationReport(self.name)
        for r in (self, other):
            out.checked += r.checked
            out.violations.extend(r.violations)
            out.skipped.extend(r.skipped)
            out.rows.extend(r.rows)
        return out

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"[{status}] {self.name}: {self.checked} checked, "
                 f"{len(self.violations)} violations, {len(self.skipped)} skipped"]
        for v in self.violations[:5]:
            lines.append(f"    seed={v.seed} witness={v.witness} lhs={v.lhs!r} rhs={v.rhs!r} {v.note}".rstrip())
        if len(self.violations) > 5:
            lines.append(f"    ... {len(self.violations) - 5} more")
        return "\n".join(lines)

    def csv_rows(self):
        for seed, ok, lhs, rhs in self.rows:
            yield self.name, "" if seed is None else seed, int(ok), lhs, rhs
