"""Shared fixtures: solver discovery and model-building helpers.

Solver resolution order: the EBV_SOLVER environment variable (a command
line), a native ``z3`` on PATH, then the repository's WASM fallback under
``tools/wasm-z3`` (set up with ``npm install`` there).  Tests that need a
solver are skipped when none is available.
"""

import os
import shutil
import subprocess
from pathlib import Path

import pytest

from ebv.solver import SolverConfig, config_from_command

REPO_ROOT = Path(__file__).resolve().parent.parent
WASM_SHIM = REPO_ROOT / "tools" / "wasm-z3" / "z3wasm"


def _works(cfg: SolverConfig) -> bool:
    try:
        proc = subprocess.run(
            cfg.argv(), input=b"(check-sat)\n",
            stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, timeout=60,
        )
    except (OSError, subprocess.TimeoutExpired):
        return False
    return proc.stdout.strip().startswith(b"sat")


def _discover() -> SolverConfig | None:
    env = os.environ.get("EBV_SOLVER", "").strip()
    if env:
        cfg = config_from_command(env)
        if _works(cfg):
            return cfg
    native = shutil.which("z3")
    if native:
        cfg = SolverConfig(native, extra_args=("-in",))
        if _works(cfg):
            return cfg
    if WASM_SHIM.exists():
        modules = WASM_SHIM.parent / "node_modules" / "z3-solver"
        if not modules.exists() and shutil.which("npm"):
            subprocess.run(
                ["npm", "install", "--no-audit", "--no-fund"],
                cwd=WASM_SHIM.parent, capture_output=True, timeout=300,
            )
        cfg = SolverConfig(str(WASM_SHIM))
        if _works(cfg):
            return cfg
    return None


_SOLVER = None
_PROBED = False


def solver_config(timeout_ms=10_000) -> SolverConfig:
    global _SOLVER, _PROBED
    if not _PROBED:
        _SOLVER = _discover()
        _PROBED = True
    if _SOLVER is None:
        pytest.skip("no SMT solver available (set EBV_SOLVER or install z3)")
    return SolverConfig(_SOLVER.solver_path, timeout_ms, _SOLVER.extra_args)


@pytest.fixture(scope="session")
def solver() -> SolverConfig:
    return solver_config()


@pytest.fixture(scope="session")
def solver_command(solver) -> str:
    """The discovered solver as a --solver/EBV_SOLVER style command line."""
    return " ".join([solver.solver_path, *solver.extra_args])
