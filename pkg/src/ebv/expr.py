"""Sorted expression trees and the symbol machinery built on them.

Expressions are immutable and carry a resolved sort; the constructors
below reject ill-sorted children, so a well-typed tree cannot be built
incorrectly.  Next-state values are distinct ``primed`` reference nodes,
not a function applied to the current value: a value-level priming
function would identify the next states of any two variables that happen
to hold equal values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping


class Sort(enum.Enum):
    INT = "int"
    BOOL = "bool"
    # Total uninterpreted Int -> Int function; legal only for context
    # constants, never for machine variables or event parameters.
    FUN = "fun"


class ExprError(Exception):
    """Ill-sorted construction or an unsafe substitution."""


# Node kinds, grouped by arity/shape.
REF_KINDS = frozenset({"var", "primed", "const", "param"})
ARITH_OPS = frozenset({"add", "sub", "mul", "div", "mod"})
CMP_OPS = frozenset({"lt", "le", "gt", "ge"})
EQ_OPS = frozenset({"eq", "ne"})
NARY_OPS = frozenset({"and", "or"})
QUANT_KINDS = frozenset({"forall", "exists"})


@dataclass(frozen=True)
class Expr:
    kind: str
    sort: Sort
    args: tuple["Expr", ...] = ()
    name: str | None = None
    value: int | bool | None = None
    bound: tuple[tuple[str, Sort], ...] = field(default=())

    def __repr__(self) -> str:  # compact, debugging only
        if self.kind in ("int", "bool"):
            return f"{self.value}"
        if self.kind in REF_KINDS:
            tick = "'" if self.kind == "primed" else ""
            return f"{self.name}{tick}"
        if self.kind == "apply":
            return f"{self.name}({self.args[0]!r})"
        if self.kind in QUANT_KINDS:
            bs = ", ".join(f"{n}:{s.value}" for n, s in self.bound)
            return f"({self.kind} ({bs}). {self.args[0]!r})"
        inside = f" {self.kind} ".join(repr(a) for a in self.args)
        return f"({inside})"


def _want(e: Expr, sort: Sort, ctx: str) -> None:
    if e.sort is not sort:
        raise ExprError(f"{ctx}: expected {sort.value}, got {e.sort.value} ({e!r})")


def intlit(v: int) -> Expr:
    return Expr("int", Sort.INT, value=int(v))


def boollit(v: bool) -> Expr:
    return Expr("bool", Sort.BOOL, value=bool(v))


TRUE = boollit(True)
FALSE = boollit(False)


def ref(kind: str, name: str, sort: Sort) -> Expr:
    if kind not in REF_KINDS:
        raise ExprError(f"not a reference kind: {kind}")
    if sort is Sort.FUN:
        raise ExprError(f"{name}: function constants appear only as applications")
    return Expr(kind, sort, name=name)


def var(name: str, sort: Sort = Sort.INT) -> Expr:
    return ref("var", name, sort)


def primed(name: str, sort: Sort = Sort.INT) -> Expr:
    return ref("primed", name, sort)


def const(name: str, sort: Sort = Sort.INT) -> Expr:
    return ref("const", name, sort)


def param(name: str, sort: Sort = Sort.INT) -> Expr:
    return ref("param", name, sort)


def apply(fun_name: str, arg: Expr) -> Expr:
    _want(arg, Sort.INT, f"{fun_name}(..)")
    return Expr("apply", Sort.INT, args=(arg,), name=fun_name)


def neg(a: Expr) -> Expr:
    _want(a, Sort.INT, "unary -")
    return Expr("neg", Sort.INT, args=(a,))


def arith(op: str, a: Expr, b: Expr) -> Expr:
    if op not in ARITH_OPS:
        raise ExprError(f"not an arithmetic op: {op}")
    _want(a, Sort.INT, op)
    _want(b, Sort.INT, op)
    return Expr(op, Sort.INT, args=(a, b))


def add(a: Expr, b: Expr) -> Expr:
    return arith("add", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    return arith("sub", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    return arith("mul", a, b)


def idiv(a: Expr, b: Expr) -> Expr:
    return arith("div", a, b)


def imod(a: Expr, b: Expr) -> Expr:
    return arith("mod", a, b)


def cmp(op: str, a: Expr, b: Expr) -> Expr:
    if op not in CMP_OPS:
        raise ExprError(f"not a comparison: {op}")
    _want(a, Sort.INT, op)
    _want(b, Sort.INT, op)
    return Expr(op, Sort.BOOL, args=(a, b))


def lt(a: Expr, b: Expr) -> Expr:
    return cmp("lt", a, b)


def le(a: Expr, b: Expr) -> Expr:
    return cmp("le", a, b)


def gt(a: Expr, b: Expr) -> Expr:
    return cmp("gt", a, b)


def ge(a: Expr, b: Expr) -> Expr:
    return cmp("ge", a, b)


def eq(a: Expr, b: Expr) -> Expr:
    if a.sort is not b.sort or a.sort is Sort.FUN:
        raise ExprError(f"= needs same-sorted int/bool operands, got {a.sort.value}/{b.sort.value}")
    return Expr("eq", Sort.BOOL, args=(a, b))


def ne(a: Expr, b: Expr) -> Expr:
    if a.sort is not b.sort or a.sort is Sort.FUN:
        raise ExprError(f"/= needs same-sorted int/bool operands, got {a.sort.value}/{b.sort.value}")
    return Expr("ne", Sort.BOOL, args=(a, b))


def not_(a: Expr) -> Expr:
    _want(a, Sort.BOOL, "not")
    return Expr("not", Sort.BOOL, args=(a,))


def _nary(op: str, parts: Iterable[Expr]) -> Expr:
    # Flatten nested applications of the same connective so that
    # associativity does not leak into structural equality.
    flat: list[Expr] = []
    for p in parts:
        _want(p, Sort.BOOL, op)
        if p.kind == op:
            flat.extend(p.args)
        else:
            flat.append(p)
    if not flat:
        return TRUE if op == "and" else FALSE
    if len(flat) == 1:
        return flat[0]
    return Expr(op, Sort.BOOL, args=tuple(flat))


def and_(*parts: Expr) -> Expr:
    return _nary("and", parts)


def or_(*parts: Expr) -> Expr:
    return _nary("or", parts)


def implies(a: Expr, b: Expr) -> Expr:
    _want(a, Sort.BOOL, "=>")
    _want(b, Sort.BOOL, "=>")
    return Expr("implies", Sort.BOOL, args=(a, b))


def iff(a: Expr, b: Expr) -> Expr:
    _want(a, Sort.BOOL, "<=>")
    _want(b, Sort.BOOL, "<=>")
    return Expr("iff", Sort.BOOL, args=(a, b))


def quant(kind: str, bound: Iterable[tuple[str, Sort]], body: Expr) -> Expr:
    if kind not in QUANT_KINDS:
        raise ExprError(f"not a quantifier: {kind}")
    bt = tuple(bound)
    if not bt:
        raise ExprError(f"{kind} needs at least one bound variable")
    for n, s in bt:
        if s is Sort.FUN:
            raise ExprError(f"{kind} {n}: bound variables must be int or bool")
    _want(body, Sort.BOOL, kind)
    return Expr(kind, Sort.BOOL, args=(body,), bound=bt)


def forall(bound: Iterable[tuple[str, Sort]], body: Expr) -> Expr:
    return quant("forall", bound, body)


def exists(bound: Iterable[tuple[str, Sort]], body: Expr) -> Expr:
    return quant("exists", bound, body)


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal of every node in the tree."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.args))


def sym_key(name: str, kind: str) -> str:
    """Render a symbol occurrence the way mappings and models name it."""
    return name + "'" if kind == "primed" else name


def free_symbols(e: Expr) -> set[tuple[str, str]]:
    """Free (unbound) symbols of ``e`` as (name, kind) pairs.

    Kinds are ``var``, ``primed``, ``const`` and ``param``; applications
    contribute their function name with kind ``const``.
    """
    out: set[tuple[str, str]] = set()
    _free(e, frozenset(), out)
    return out


def _free(e: Expr, bound: frozenset[str], out: set[tuple[str, str]]) -> None:
    if e.kind in REF_KINDS:
        if e.name not in bound:
            out.add((e.name, e.kind))
        return
    if e.kind == "apply":
        out.add((e.name, "const"))
    elif e.kind in QUANT_KINDS:
        bound = bound | {n for n, _ in e.bound}
    for a in e.args:
        _free(a, bound, out)


def free_symbol_sorts(exprs: Iterable[Expr]) -> dict[tuple[str, str], Sort]:
    """Free symbols of several trees, with their resolved sorts."""
    out: dict[tuple[str, str], Sort] = {}
    for e in exprs:
        _free_sorted(e, frozenset(), out)
    return out


def _free_sorted(e: Expr, bound: frozenset[str], out: dict[tuple[str, str], Sort]) -> None:
    if e.kind in REF_KINDS:
        if e.name not in bound:
            out.setdefault((e.name, e.kind), e.sort)
        return
    if e.kind == "apply":
        out.setdefault((e.name, "const"), Sort.FUN)
    elif e.kind in QUANT_KINDS:
        bound = bound | {n for n, _ in e.bound}
    for a in e.args:
        _free_sorted(a, bound, out)


def prime_frame(variables: Iterable[tuple[str, Sort]]) -> dict[str, Expr]:
    """Map each variable name to its next-state reference."""
    return {name: primed(name, sort) for name, sort in variables}


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace free var/param/primed references by expressions.

    Keys name plain references (``"x"``) or primed ones (``"x'"``).
    Bound occurrences are left untouched; a replacement whose free names
    would be captured by an enclosing binder is rejected, as is a
    replacement whose sort differs from the replaced symbol's.
    """
    if not mapping:
        return e
    return _subst(e, mapping, frozenset())


def _subst(e: Expr, mapping: Mapping[str, Expr], binders: frozenset[str]) -> Expr:
    if e.kind in ("var", "param", "primed"):
        if e.name in binders:
            return e
        key = sym_key(e.name, e.kind)
        repl = mapping.get(key)
        if repl is None:
            return e
        if repl.sort is not e.sort:
            raise ExprError(
                f"substitution for {key} has sort {repl.sort.value}, expected {e.sort.value}"
            )
        return repl
    if e.kind in QUANT_KINDS:
        names = {n for n, _ in e.bound}
        inner = {k: v for k, v in mapping.items() if k.rstrip("'") not in names}
        if not inner:
            return e
        for k, v in inner.items():
            captured = {n for n, _ in free_symbols(v)} & names
            if captured:
                raise ExprError(
                    f"substituting {k} would capture bound {sorted(captured)!r}"
                )
        body = _subst(e.args[0], inner, binders | names)
        if body is e.args[0]:
            return e
        return Expr(e.kind, e.sort, args=(body,), bound=e.bound)
    if not e.args:
        return e
    new_args = tuple(_subst(a, mapping, binders) for a in e.args)
    if all(n is o for n, o in zip(new_args, e.args)):
        return e
    return Expr(e.kind, e.sort, args=new_args, name=e.name, value=e.value, bound=e.bound)
