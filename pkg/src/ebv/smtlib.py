"""SMT-LIB 2 script emission and solver-model parsing.

Validity is checked by refutation: the script asserts every hypothesis
plus the negated goal, so ``unsat`` discharges the obligation and a
``sat`` answer comes with a counterexample model.  Existential goals are
negated into universals, keeping the single refutation scheme.

Emission is a pure function of the obligation: byte-identical scripts
for equal obligations, regardless of process or thread.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import expr as ex
from .expr import Expr, Sort, sym_key
from .pogen import ExistentialGoal, ProofObligation


@dataclass(frozen=True)
class SmtScript:
    po_id: str
    text: str
    # model-side name (primes rendered with ') -> emitted SMT symbol
    symbol_table: dict[str, str]


class EmitError(Exception):
    pass


def mangle(name: str) -> str:
    """Primed names become quoted symbols; everything else passes through."""
    return f"|{name}|" if name.endswith("'") else name


def _smt_sort(sort: Sort) -> str:
    if sort is Sort.INT:
        return "Int"
    if sort is Sort.BOOL:
        return "Bool"
    raise EmitError("function sorts have no first-class values")


def term(e: Expr) -> str:
    k = e.kind
    if k == "int":
        return str(e.value) if e.value >= 0 else f"(- {-e.value})"
    if k == "bool":
        return "true" if e.value else "false"
    if k in ex.REF_KINDS:
        return mangle(sym_key(e.name, k))
    if k == "apply":
        return f"({e.name} {term(e.args[0])})"
    if k == "neg":
        return f"(- {term(e.args[0])})"
    if k in ("forall", "exists"):
        bound = " ".join(f"({mangle(n)} {_smt_sort(s)})" for n, s in e.bound)
        return f"({k} ({bound}) {term(e.args[0])})"
    op = {
        "add": "+", "sub": "-", "mul": "*", "div": "div", "mod": "mod",
        "lt": "<", "le": "<=", "gt": ">", "ge": ">=",
        "eq": "=", "ne": "distinct", "not": "not", "and": "and", "or": "or",
        "implies": "=>", "iff": "=",
    }.get(k)
    if op is None:
        raise EmitError(f"unsupported expression node {k!r}")
    inner = " ".join(term(a) for a in e.args)
    return f"({op} {inner})"


def emit(po: ProofObligation) -> SmtScript:
    """Render one obligation as a self-contained SMT-LIB 2 script."""
    lines = [f"; po: {po.id}", "(set-logic ALL)"]
    table: dict[str, str] = {}
    for s in po.symbols:
        name = sym_key(s.name, s.kind)
        emitted = mangle(name)
        table[name] = emitted
        if s.sort is Sort.FUN:
            lines.append(f"(declare-fun {emitted} (Int) Int)")
        else:
            lines.append(f"(declare-const {emitted} {_smt_sort(s.sort)})")
    for tag, hyp in po.hypotheses:
        lines.append(f"(assert {term(hyp)}) ; {tag}")
    if isinstance(po.goal, ExistentialGoal):
        bound = " ".join(
            f"({mangle(n)} {_smt_sort(s)})" for n, s in po.goal.bound
        )
        lines.append(f"(assert (forall ({bound}) (not {term(po.goal.body)}))) ; negated goal")
    else:
        lines.append(f"(assert (not {term(po.goal.body)})) ; negated goal")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return SmtScript(po.id, "\n".join(lines) + "\n", table)


# ---------------------------------------------------------------------------
# Model output parsing


def _sexprs(text: str) -> list:
    """All top-level s-expressions in ``text``, atoms as strings."""
    tokens: list[str] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in "()":
            tokens.append(c)
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                break
            tokens.append(text[i : j + 1])
            i = j + 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();|":
                j += 1
            tokens.append(text[i:j])
            i = j
    out: list = []
    stack: list[list] = []
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                continue
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
        else:
            (stack[-1] if stack else out).append(tok)
    return out


def _atom_value(node) -> int | bool | None:
    if node == "true":
        return True
    if node == "false":
        return False
    if isinstance(node, str):
        try:
            return int(node)
        except ValueError:
            return None
    if (
        isinstance(node, list)
        and len(node) == 2
        and node[0] == "-"
        and isinstance(node[1], str)
    ):
        try:
            return -int(node[1])
        except ValueError:
            return None
    return None


def parse_model(output: str) -> dict[str, int | bool]:
    """Ground constant values from a ``get-model`` answer.

    Function interpretations and non-literal bodies are skipped; names
    come back unmangled (``|x'|`` as ``x'``).
    """
    values: dict[str, int | bool] = {}
    for top in _sexprs(output):
        if not isinstance(top, list):
            continue
        entries = top
        if entries and entries[0] == "model":  # older solvers wrap with 'model'
            entries = entries[1:]
        for entry in entries:
            if (
                not isinstance(entry, list)
                or len(entry) != 5
                or entry[0] != "define-fun"
                or entry[2] != []
            ):
                continue
            value = _atom_value(entry[4])
            if value is None:
                continue
            name = entry[1]
            if name.startswith("|") and name.endswith("|"):
                name = name[1:-1]
            values[name] = value
    return values
