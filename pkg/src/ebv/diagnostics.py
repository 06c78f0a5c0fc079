"""Positioned diagnostics shared by the lexer, parser and type checker."""

from __future__ import annotations

from dataclasses import dataclass


# Stable diagnostic codes.  Tests and downstream tooling match on these,
# so they are part of the frontend's contract.
SYNTAX_ERROR = "SYNTAX_ERROR"
DUPLICATE_NAME = "DUPLICATE_NAME"
DUPLICATE_LABEL = "DUPLICATE_LABEL"
DUPLICATE_VARIABLE = "DUPLICATE_VARIABLE"
DUPLICATE_WITNESS = "DUPLICATE_WITNESS"
UNRESOLVED_NAME = "UNRESOLVED_NAME"
SORT_MISMATCH = "SORT_MISMATCH"
FRAME_VIOLATION = "FRAME_VIOLATION"
PRIMED_OUTSIDE_FRAME = "PRIMED_OUTSIDE_FRAME"
PRIMED_NOT_ALLOWED = "PRIMED_NOT_ALLOWED"
MISSING_VARIANT = "MISSING_VARIANT"
MISSING_WITNESS = "MISSING_WITNESS"
UNKNOWN_WITNESS_TARGET = "UNKNOWN_WITNESS_TARGET"
WITNESS_NOT_ALLOWED = "WITNESS_NOT_ALLOWED"
MISSING_INIT = "MISSING_INIT"
INIT_MALFORMED = "INIT_MALFORMED"
REFINES_UNKNOWN = "REFINES_UNKNOWN"
SEES_MISMATCH = "SEES_MISMATCH"
FUN_SORT_NOT_ALLOWED = "FUN_SORT_NOT_ALLOWED"
SHADOWED_BINDER = "SHADOWED_BINDER"
VARIANT_SCOPE = "VARIANT_SCOPE"
DUPLICATE_ASSIGNMENT = "DUPLICATE_ASSIGNMENT"
EXTENDS_TOO_DEEP = "EXTENDS_TOO_DEEP"


@dataclass(frozen=True)
class Position:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    position: Position
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.position}: {self.severity}[{self.code}]: {self.message}"


def error(pos: Position, code: str, message: str) -> Diagnostic:
    return Diagnostic("error", pos, code, message)


def warning(pos: Position, code: str, message: str) -> Diagnostic:
    return Diagnostic("warning", pos, code, message)
