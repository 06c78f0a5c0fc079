"""Run reports: per-obligation records, summaries, JSON round-trip."""

from __future__ import annotations

from dataclasses import dataclass

from .solver import Verdict, VerificationResult


@dataclass(frozen=True)
class PoRecord:
    id: str
    kind: str
    status: str  # discharged | failed | unknown | error
    time_ms: int
    counterexample: dict[str, int | bool] | None = None


@dataclass(frozen=True)
class Summary:
    discharged: int = 0
    failed: int = 0
    unknown: int = 0
    error: int = 0
    total_ms: int = 0


@dataclass(frozen=True)
class RunReport:
    project: str
    pos: tuple[PoRecord, ...]
    summary: Summary
    version: str
    solver: str

    def to_dict(self) -> dict:
        pos = []
        for r in self.pos:
            entry: dict = {
                "id": r.id, "kind": r.kind, "status": r.status,
                "time_ms": r.time_ms,
            }
            if r.counterexample is not None:
                entry["counterexample"] = dict(r.counterexample)
            pos.append(entry)
        return {
            "project": self.project,
            "pos": pos,
            "summary": {
                "discharged": self.summary.discharged,
                "failed": self.summary.failed,
                "unknown": self.summary.unknown,
                "error": self.summary.error,
                "total_ms": self.summary.total_ms,
            },
            "version": self.version,
            "solver": self.solver,
        }

    @staticmethod
    def from_dict(d: dict) -> "RunReport":
        pos = tuple(
            PoRecord(e["id"], e["kind"], e["status"], e["time_ms"],
                     e.get("counterexample"))
            for e in d["pos"]
        )
        s = d["summary"]
        return RunReport(
            d["project"], pos,
            Summary(s["discharged"], s["failed"], s["unknown"], s["error"],
                    s["total_ms"]),
            d["version"], d["solver"],
        )


def build_report(project: str, kinds: dict[str, str],
                 results: list[VerificationResult], version: str,
                 solver: str) -> RunReport:
    records = tuple(
        PoRecord(r.po_id, kinds[r.po_id], r.status.value, r.solver_time_ms,
                 dict(r.counterexample) if r.counterexample is not None else None)
        for r in results
    )
    tally = {v: 0 for v in Verdict}
    for r in results:
        tally[r.status] += 1
    summary = Summary(
        discharged=tally[Verdict.DISCHARGED],
        failed=tally[Verdict.FAILED],
        unknown=tally[Verdict.UNKNOWN],
        error=tally[Verdict.ERROR],
        total_ms=sum(r.solver_time_ms for r in results),
    )
    return RunReport(project, records, summary, version, solver)


def exit_code(summary: Summary) -> int:
    """0 all discharged, 1 any failed, 2 unknowns only, 3 errors."""
    if summary.failed:
        return 1
    if summary.error:
        return 3
    if summary.unknown:
        return 2
    return 0
