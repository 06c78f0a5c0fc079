"""External solver processes: one isolated run per obligation.

The child receives a complete SMT-LIB 2 script on standard input and
answers on standard output; any SMT-LIB-conformant solver works (for z3
pass ``-in``).  A wall-clock timeout kills the process and reports
Unknown.  ``discharge_all`` fans obligations out to a bounded pool of
worker threads, each owning its own child process, and returns results
in obligation order whatever the completion order was.
"""

from __future__ import annotations

import enum
import math
import os
import shlex
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .pogen import ProofObligation
from .smtlib import SmtScript, emit, parse_model

DEFAULT_TIMEOUT_MS = 10_000
SOLVER_ENV_VAR = "EBV_SOLVER"


class Verdict(enum.Enum):
    DISCHARGED = "discharged"  # solver answered unsat
    FAILED = "failed"          # solver answered sat: counterexample found
    UNKNOWN = "unknown"        # unknown answer or timeout
    ERROR = "error"            # spawn or output failure


@dataclass(frozen=True)
class SolverConfig:
    solver_path: str
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    extra_args: tuple[str, ...] = ()

    def argv(self) -> list[str]:
        return [self.solver_path, *self.extra_args]


def default_config(timeout_ms: int = DEFAULT_TIMEOUT_MS) -> SolverConfig:
    """Solver from $EBV_SOLVER (a command line) or plain ``z3 -in``."""
    command = os.environ.get(SOLVER_ENV_VAR, "").strip() or "z3 -in"
    return config_from_command(command, timeout_ms)


def config_from_command(command: str, timeout_ms: int = DEFAULT_TIMEOUT_MS) -> SolverConfig:
    parts = shlex.split(command)
    return SolverConfig(parts[0], timeout_ms, tuple(parts[1:]))


@dataclass(frozen=True)
class VerificationResult:
    po_id: str
    status: Verdict
    counterexample: dict[str, int | bool] | None = None
    solver_time_ms: int = 0
    diagnostics: str = ""


def discharge(script: SmtScript, cfg: SolverConfig) -> VerificationResult:
    """Run one solver process over one script and map its answer."""
    start = time.monotonic()

    def took() -> int:
        return math.ceil((time.monotonic() - start) * 1000)

    try:
        proc = subprocess.run(
            cfg.argv(),
            input=script.text.encode(),
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            timeout=cfg.timeout_ms / 1000.0,
        )
    except subprocess.TimeoutExpired:
        return VerificationResult(
            script.po_id, Verdict.UNKNOWN,
            solver_time_ms=max(took(), cfg.timeout_ms),
            diagnostics=f"timeout after {cfg.timeout_ms} ms",
        )
    except OSError as e:
        return VerificationResult(
            script.po_id, Verdict.ERROR, solver_time_ms=took(),
            diagnostics=f"cannot run solver {cfg.solver_path!r}: {e}",
        )

    out = proc.stdout.decode(errors="replace")
    first = out.split(None, 1)[0] if out.split() else ""
    if first == "unsat":
        return VerificationResult(script.po_id, Verdict.DISCHARGED,
                                  solver_time_ms=took())
    if first == "sat":
        model = parse_model(out)
        return VerificationResult(script.po_id, Verdict.FAILED,
                                  counterexample=model, solver_time_ms=took())
    if first == "unknown":
        return VerificationResult(script.po_id, Verdict.UNKNOWN,
                                  solver_time_ms=took(),
                                  diagnostics="solver answered unknown")
    excerpt = (out or proc.stderr.decode(errors="replace")).strip()
    return VerificationResult(
        script.po_id, Verdict.ERROR, solver_time_ms=took(),
        diagnostics=f"unrecognised solver output: {excerpt[:200]!r}",
    )


def discharge_po(po: ProofObligation, cfg: SolverConfig) -> VerificationResult:
    return discharge(emit(po), cfg)


def discharge_all(
    pos: list[ProofObligation], cfg: SolverConfig, jobs: int = 1
) -> list[VerificationResult]:
    """Discharge every obligation, results in obligation order."""
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    if not pos:
        return []
    if jobs == 1:
        return [discharge_po(po, cfg) for po in pos]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda po: discharge_po(po, cfg), pos))
