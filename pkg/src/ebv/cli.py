"""Command line driver: ``ebv verify`` and ``ebv pos``.

Exit codes: 0 every obligation discharged; 1 at least one failed;
2 no failures but some unknown; 3 parse/type/solver-setup errors.
"""

from __future__ import annotations

import argparse
import fnmatch
import json
import sys
from pathlib import Path

from . import __version__
from .parser import SourceUnit, parse
from .pogen import ProofObligation, gen_project_pos
from .report import build_report, exit_code
from .smtlib import emit
from .solver import (
    DEFAULT_TIMEOUT_MS,
    SolverConfig,
    config_from_command,
    default_config,
    discharge_all,
)
from .typecheck import resolve_and_typecheck


def _load_model(paths: list[str]):
    units: list[SourceUnit] = []
    diagnostics = []
    for p in paths:
        try:
            text = Path(p).read_text(encoding="utf-8")
        except OSError as e:
            print(f"ebv: cannot read {p}: {e}", file=sys.stderr)
            return None
        unit, diags = parse(p, text)
        diagnostics += diags
        units.append(unit)
    if not diagnostics:
        model, diags = resolve_and_typecheck(units)
        diagnostics += diags
    else:
        model = None
    for d in diagnostics:
        print(d, file=sys.stderr)
    if model is None or any(d.severity == "error" for d in diagnostics):
        return None
    return model


def _project_name(paths: list[str]) -> str:
    return "+".join(Path(p).stem for p in paths)


def _solver_config(args) -> SolverConfig:
    if args.solver:
        return config_from_command(args.solver, args.timeout)
    return default_config(args.timeout)


def _dump_scripts(directory: str, scripts) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for script in scripts:
        name = script.po_id.replace("/", "__") + ".smt2"
        (out / name).write_text(script.text, encoding="utf-8")


def _render_counterexample(cex: dict[str, int | bool]) -> str:
    parts = []
    for name in sorted(cex):
        v = cex[name]
        parts.append(f"{name} = {str(v).lower() if isinstance(v, bool) else v}")
    return ", ".join(parts)


def cmd_verify(args) -> int:
    model = _load_model(args.files)
    if model is None:
        return 3
    pos: list[ProofObligation] = gen_project_pos(
        model, include_nat=not args.no_nat_po
    )
    if args.filter:
        pos = [p for p in pos if fnmatch.fnmatchcase(p.id, args.filter)]
    if args.dump_smt:
        _dump_scripts(args.dump_smt, (emit(p) for p in pos))
    cfg = _solver_config(args)
    results = discharge_all(pos, cfg, jobs=args.jobs)
    kinds = {p.id: p.kind for p in pos}
    report = build_report(
        _project_name(args.files), kinds, results, __version__,
        " ".join(cfg.argv()),
    )
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        for rec in report.pos:
            print(f"{rec.id:<44} {rec.kind:<4} {rec.status:<10} {rec.time_ms:>7} ms")
            if rec.counterexample:
                print(f"    counterexample: {_render_counterexample(rec.counterexample)}")
        s = report.summary
        print(
            f"discharged {s.discharged}  failed {s.failed}  "
            f"unknown {s.unknown}  error {s.error}  total {s.total_ms} ms"
        )
    return exit_code(report.summary)


def cmd_pos(args) -> int:
    model = _load_model(args.files)
    if model is None:
        return 3
    for po in gen_project_pos(model):
        print(po.id)
    return 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ebv",
        description="Verify refinement-calculus machine models with an SMT solver.",
    )
    ap.add_argument("--version", action="version", version=f"ebv {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="generate and discharge all proof obligations")
    verify.add_argument("files", nargs="*", help="model files (.eb)")
    verify.add_argument("--timeout", type=int, default=DEFAULT_TIMEOUT_MS,
                        metavar="MS", help="per-obligation solver timeout")
    verify.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="parallel solver processes")
    verify.add_argument("--json", action="store_true",
                        help="print a JSON report instead of text")
    verify.add_argument("--filter", metavar="GLOB",
                        help="only discharge obligations whose id matches")
    verify.add_argument("--solver", metavar="CMD",
                        help="solver command line (default: $EBV_SOLVER or 'z3 -in')")
    verify.add_argument("--dump-smt", metavar="DIR",
                        help="write each emitted script to DIR")
    verify.add_argument("--no-nat-po", action="store_true",
                        help="omit variant non-negativity obligations")
    verify.set_defaults(func=cmd_verify)

    pos = sub.add_parser("pos", help="list proof-obligation ids without solving")
    pos.add_argument("files", nargs="*", help="model files (.eb)")
    pos.set_defaults(func=cmd_pos)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if not args.files:
        print("ebv: no model files given", file=sys.stderr)
        _parser().print_usage(sys.stderr)
        return 3
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
