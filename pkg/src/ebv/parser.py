"""Lexer, parser and printer for the ``.eb`` modelling language.

The concrete grammar (`
  project   := (context | machine)*
  context   := "context" ID ("extends" ID)? "constants" (ID ":" sort)*
               ("axioms" labpred*)? ("theorems" labpred*)? "end"
  machine   := "machine" ID ("refines" ID)? "sees" ID
               "variables" (ID ":" sort)* "invariants" labpred*
               ("variant" expr)? "events" event* "end"
  event     := "event" ID ("refines" ID)? ("status" STATUS)?
               ("any" (ID ":" sort)+)? ("where" labpred+)?
               ("with" witness+)? ("then" action+)? "end"
  witness   := "@" ID ":" expr
  action    := "@" ID (ID ":=" expr | idlist ":|" expr | ID ":∈" expr ".." expr)
  labpred   := "@" ID expr
  sort      := "int" | "bool" | "fun"
`) is parsed by recursive descent into a surface tree that carries
positions but no sorts; resolution and sorting happen in `typecheck`.
``//`` starts a comment running to end of line.

Parsing is deterministic: the same bytes always give the same tree and
the same diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import SYNTAX_ERROR, Diagnostic, Position, error

KEYWORDS = {
    "context", "extends", "constants", "axioms", "theorems", "end",
    "machine", "refines", "sees", "variables", "invariants", "variant",
    "events", "event", "status", "any", "where", "with", "then",
    "ordinary", "convergent", "anticipated",
    "int", "bool", "fun",
    "and", "or", "not", "true", "false", "forall", "exists", "div", "mod",
}

STATUS_WORDS = ("ordinary", "convergent", "anticipated")
SORT_WORDS = ("int", "bool", "fun")

# Multi-character operators, longest first so maximal munch works.
_OPERATORS = [
    "<=>", ":=", ":|", ":∈", "..", "<=", ">=", "=>", "/=",
    "@", ":", ",", ".", "(", ")", "+", "-", "*", "<", ">", "=",
]


@dataclass(frozen=True)
class Token:
    type: str  # keyword, operator, "IDENT", "PRIMED", "INT", "EOF"
    value: str
    pos: Position


class ParseFailure(Exception):
    def __init__(self, pos: Position, message: str):
        super().__init__(message)
        self.pos = pos
        self.message = message


def tokenize(path: str, text: str) -> list[Token]:
    toks: list[Token] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        pos = Position(path, line, col)
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("INT", text[i:j], pos))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if j < n and text[j] == "'":
                if word in KEYWORDS:
                    raise ParseFailure(pos, f"keyword '{word}' cannot be primed")
                toks.append(Token("PRIMED", word, pos))
                j += 1
            elif word in KEYWORDS:
                toks.append(Token(word, word, pos))
            else:
                toks.append(Token("IDENT", word, pos))
            col += j - i
            i = j
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                toks.append(Token(op, op, pos))
                i += len(op)
                col += len(op)
                break
        else:
            raise ParseFailure(pos, f"unexpected character {c!r}")
    toks.append(Token("EOF", "", Position(path, line, col)))
    return toks


# ---------------------------------------------------------------------------
# Surface tree.  Positions never participate in equality, so two parses of
# the same structure compare equal even if whitespace moved.


@dataclass(frozen=True)
class PExpr:
    op: str
    args: tuple["PExpr", ...] = ()
    name: str | None = None
    value: int | None = None
    bound: tuple[tuple[str, str], ...] = ()
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class PLabeled:
    label: str
    expr: PExpr
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class PTypedName:
    name: str
    sort: str
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class PWitness:
    target: str  # "a" for a parameter, "x'" for a primed variable
    expr: PExpr
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class PAction:
    label: str
    kind: str  # "assign" | "suchthat" | "in"
    targets: tuple[str, ...]
    exprs: tuple[PExpr, ...]
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class PEvent:
    name: str
    refines: str | None = None
    status: str | None = None
    params: tuple[PTypedName, ...] = ()
    guards: tuple[PLabeled, ...] = ()
    witnesses: tuple[PWitness, ...] = ()
    actions: tuple[PAction, ...] = ()
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class PContext:
    name: str
    extends: str | None = None
    constants: tuple[PTypedName, ...] = ()
    axioms: tuple[PLabeled, ...] = ()
    theorems: tuple[PLabeled, ...] = ()
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class PMachine:
    name: str
    refines: str | None = None
    sees: str = ""
    variables: tuple[PTypedName, ...] = ()
    invariants: tuple[PLabeled, ...] = ()
    variant: PExpr | None = None
    events: tuple[PEvent, ...] = ()
    pos: Position | None = field(default=None, compare=False)


PDecl = PContext | PMachine


@dataclass(frozen=True)
class SourceUnit:
    path: str
    text: str
    declarations: tuple[PDecl, ...] = ()


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # -- token helpers ------------------------------------------------------

    def peek(self) -> Token:
        return self.toks[self.i]

    def at(self, *types: str) -> bool:
        return self.toks[self.i].type in types

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, type_: str, what: str | None = None) -> Token:
        t = self.peek()
        if t.type != type_:
            expected = what or f"'{type_}'"
            raise ParseFailure(
                t.pos, f"expected {expected}, found {t.value or t.type!r}"
            )
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        return self.expect("IDENT", what).value

    # -- declarations -------------------------------------------------------

    def project(self) -> tuple[PDecl, ...]:
        decls: list[PDecl] = []
        while not self.at("EOF"):
            if self.at("context"):
                decls.append(self.context())
            elif self.at("machine"):
                decls.append(self.machine())
            else:
                t = self.peek()
                raise ParseFailure(
                    t.pos,
                    f"expected one of 'context', 'machine', found {t.value or t.type!r}",
                )
        return tuple(decls)

    def context(self) -> PContext:
        pos = self.expect("context").pos
        name = self.ident("context name")
        extends = None
        if self.at("extends"):
            self.advance()
            extends = self.ident("context name")
        self.expect("constants")
        constants = self.typed_names(allow_fun=True)
        axioms: tuple[PLabeled, ...] = ()
        theorems: tuple[PLabeled, ...] = ()
        if self.at("axioms"):
            self.advance()
            axioms = self.labpreds()
        if self.at("theorems"):
            self.advance()
            theorems = self.labpreds()
        self.expect("end")
        return PContext(name, extends, constants, axioms, theorems, pos)

    def machine(self) -> PMachine:
        pos = self.expect("machine").pos
        name = self.ident("machine name")
        refines = None
        if self.at("refines"):
            self.advance()
            refines = self.ident("machine name")
        self.expect("sees")
        sees = self.ident("context name")
        self.expect("variables")
        variables = self.typed_names(allow_fun=False)
        self.expect("invariants")
        invariants = self.labpreds()
        variant = None
        if self.at("variant"):
            self.advance()
            variant = self.expr()
        self.expect("events")
        events = []
        while self.at("event"):
            events.append(self.event())
        self.expect("end")
        return PMachine(name, refines, sees, variables, invariants, variant,
                        tuple(events), pos)

    def event(self) -> PEvent:
        pos = self.expect("event").pos
        name = self.ident("event name")
        refines = None
        if self.at("refines"):
            self.advance()
            refines = self.ident("event name")
        status = None
        if self.at("status"):
            self.advance()
            t = self.peek()
            if t.type not in STATUS_WORDS:
                raise ParseFailure(
                    t.pos,
                    "expected one of 'ordinary', 'convergent', 'anticipated', "
                    f"found {t.value or t.type!r}",
                )
            status = self.advance().type
        params: tuple[PTypedName, ...] = ()
        if self.at("any"):
            self.advance()
            params = self.typed_names(allow_fun=False)
            if not params:
                t = self.peek()
                raise ParseFailure(t.pos, f"expected parameter after 'any', found {t.value or t.type!r}")
        guards: tuple[PLabeled, ...] = ()
        if self.at("where"):
            self.advance()
            guards = self.labpreds()
            if not guards:
                t = self.peek()
                raise ParseFailure(t.pos, f"expected guard after 'where', found {t.value or t.type!r}")
        witnesses: list[PWitness] = []
        if self.at("with"):
            self.advance()
            while self.at("@"):
                witnesses.append(self.witness())
            if not witnesses:
                t = self.peek()
                raise ParseFailure(t.pos, f"expected witness after 'with', found {t.value or t.type!r}")
        actions: list[PAction] = []
        if self.at("then"):
            self.advance()
            while self.at("@"):
                actions.append(self.action())
            if not actions:
                t = self.peek()
                raise ParseFailure(t.pos, f"expected action after 'then', found {t.value or t.type!r}")
        self.expect("end")
        return PEvent(name, refines, status, params, guards,
                      tuple(witnesses), tuple(actions), pos)

    def typed_names(self, allow_fun: bool) -> tuple[PTypedName, ...]:
        out = []
        while self.at("IDENT"):
            t = self.advance()
            self.expect(":")
            st = self.peek()
            sorts = SORT_WORDS if allow_fun else SORT_WORDS[:2]
            if st.type not in sorts:
                choices = ", ".join(f"'{s}'" for s in sorts)
                raise ParseFailure(
                    st.pos, f"expected one of {choices}, found {st.value or st.type!r}"
                )
            self.advance()
            out.append(PTypedName(t.value, st.type, t.pos))
        return tuple(out)

    def labpreds(self) -> tuple[PLabeled, ...]:
        out = []
        while self.at("@"):
            pos = self.advance().pos
            label = self.ident("label")
            out.append(PLabeled(label, self.expr(), pos))
        return tuple(out)

    def witness(self) -> PWitness:
        pos = self.expect("@").pos
        t = self.peek()
        if t.type == "PRIMED":
            target = self.advance().value + "'"
        else:
            target = self.ident("witness target")
        self.expect(":")
        return PWitness(target, self.expr(), pos)

    def action(self) -> PAction:
        pos = self.expect("@").pos
        label = self.ident("action label")
        first = self.ident("assigned variable")
        if self.at(":="):
            self.advance()
            return PAction(label, "assign", (first,), (self.expr(),), pos)
        if self.at(","):
            names = [first]
            while self.at(","):
                self.advance()
                names.append(self.ident("assigned variable"))
            self.expect(":|")
            return PAction(label, "suchthat", tuple(names), (self.expr(),), pos)
        if self.at(":|"):
            self.advance()
            return PAction(label, "suchthat", (first,), (self.expr(),), pos)
        if self.at(":∈"):
            self.advance()
            lo = self.expr()
            self.expect("..")
            hi = self.expr()
            return PAction(label, "in", (first,), (lo, hi), pos)
        t = self.peek()
        raise ParseFailure(
            t.pos,
            f"expected one of ':=', ':|', ':∈', ',', found {t.value or t.type!r}",
        )

    # -- expressions, loosest binding first ---------------------------------

    def expr(self) -> PExpr:
        return self.iff_expr()

    def iff_expr(self) -> PExpr:
        lhs = self.implies_expr()
        while self.at("<=>"):
            pos = self.advance().pos
            lhs = PExpr("iff", (lhs, self.implies_expr()), pos=pos)
        return lhs

    def implies_expr(self) -> PExpr:
        lhs = self.or_expr()
        if self.at("=>"):
            pos = self.advance().pos
            return PExpr("implies", (lhs, self.implies_expr()), pos=pos)
        return lhs

    def or_expr(self) -> PExpr:
        parts = [self.and_expr()]
        pos = self.peek().pos
        while self.at("or"):
            self.advance()
            parts.append(self.and_expr())
        if len(parts) == 1:
            return parts[0]
        return PExpr("or", tuple(parts), pos=pos)

    def and_expr(self) -> PExpr:
        parts = [self.not_expr()]
        pos = self.peek().pos
        while self.at("and"):
            self.advance()
            parts.append(self.not_expr())
        if len(parts) == 1:
            return parts[0]
        return PExpr("and", tuple(parts), pos=pos)

    def not_expr(self) -> PExpr:
        if self.at("not"):
            pos = self.advance().pos
            return PExpr("not", (self.not_expr(),), pos=pos)
        return self.cmp_expr()

    _CMP = {"<": "lt", "<=": "le", ">": "gt", ">=": "ge", "=": "eq", "/=": "ne"}

    def cmp_expr(self) -> PExpr:
        lhs = self.add_expr()
        if self.peek().type in self._CMP:
            t = self.advance()
            return PExpr(self._CMP[t.type], (lhs, self.add_expr()), pos=t.pos)
        return lhs

    def add_expr(self) -> PExpr:
        lhs = self.mul_expr()
        while self.at("+", "-"):
            t = self.advance()
            op = "add" if t.type == "+" else "sub"
            lhs = PExpr(op, (lhs, self.mul_expr()), pos=t.pos)
        return lhs

    def mul_expr(self) -> PExpr:
        lhs = self.unary_expr()
        while self.at("*", "div", "mod"):
            t = self.advance()
            op = {"*": "mul", "div": "div", "mod": "mod"}[t.type]
            lhs = PExpr(op, (lhs, self.unary_expr()), pos=t.pos)
        return lhs

    def unary_expr(self) -> PExpr:
        if self.at("-"):
            pos = self.advance().pos
            return PExpr("neg", (self.unary_expr(),), pos=pos)
        return self.atom()

    def atom(self) -> PExpr:
        t = self.peek()
        if t.type == "INT":
            self.advance()
            return PExpr("int", value=int(t.value), pos=t.pos)
        if t.type in ("true", "false"):
            self.advance()
            return PExpr(t.type, pos=t.pos)
        if t.type == "PRIMED":
            self.advance()
            return PExpr("primed", name=t.value, pos=t.pos)
        if t.type == "IDENT":
            self.advance()
            if self.at("("):
                self.advance()
                arg = self.expr()
                self.expect(")")
                return PExpr("apply", (arg,), name=t.value, pos=t.pos)
            return PExpr("name", name=t.value, pos=t.pos)
        if t.type == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if t.type in ("forall", "exists"):
            self.advance()
            self.expect("(")
            bound = [self.binder()]
            while self.at(","):
                self.advance()
                bound.append(self.binder())
            self.expect(")")
            self.expect(".")
            body = self.expr()
            return PExpr(t.type, (body,), bound=tuple(bound), pos=t.pos)
        raise ParseFailure(
            t.pos,
            "expected one of integer, 'true', 'false', identifier, '(', "
            f"'forall', 'exists', '-', found {t.value or t.type!r}",
        )

    def binder(self) -> tuple[str, str]:
        name = self.ident("bound variable")
        self.expect(":")
        st = self.peek()
        if st.type not in ("int", "bool"):
            raise ParseFailure(
                st.pos, f"expected one of 'int', 'bool', found {st.value or st.type!r}"
            )
        self.advance()
        return (name, st.type)


def parse(path: str, text: str) -> tuple[SourceUnit, list[Diagnostic]]:
    """Parse one source file; syntax failures come back as diagnostics."""
    try:
        decls = _Parser(tokenize(path, text)).project()
    except ParseFailure as f:
        return SourceUnit(path, text), [error(f.pos, SYNTAX_ERROR, f.message)]
    return SourceUnit(path, text, decls), []


# ---------------------------------------------------------------------------
# Printing.  `to_source(parse(text))` reparses to an identical tree.

_PREC = {
    "forall": 0, "exists": 0,
    "iff": 1, "implies": 2, "or": 3, "and": 4, "not": 5,
    "lt": 6, "le": 6, "gt": 6, "ge": 6, "eq": 6, "ne": 6,
    "add": 7, "sub": 7, "mul": 8, "div": 8, "mod": 8, "neg": 9,
}
_ATOM_PREC = 10
_INFIX = {
    "iff": "<=>", "implies": "=>", "or": "or", "and": "and",
    "lt": "<", "le": "<=", "gt": ">", "ge": ">=", "eq": "=", "ne": "/=",
    "add": "+", "sub": "-", "mul": "*", "div": "div", "mod": "mod",
}


def expr_to_source(e: PExpr) -> str:
    return _fmt(e)


def _prec(e: PExpr) -> int:
    return _PREC.get(e.op, _ATOM_PREC)


def _child(e: PExpr, floor: int) -> str:
    s = _fmt(e)
    return f"({s})" if _prec(e) < floor else s


def _fmt(e: PExpr) -> str:
    op = e.op
    if op == "int":
        return str(e.value)
    if op in ("true", "false"):
        return op
    if op == "name":
        return e.name
    if op == "primed":
        return e.name + "'"
    if op == "apply":
        return f"{e.name}({_fmt(e.args[0])})"
    if op in ("forall", "exists"):
        bs = ", ".join(f"{n}:{s}" for n, s in e.bound)
        return f"{op} ({bs}). {_fmt(e.args[0])}"
    if op == "not":
        return f"not {_child(e.args[0], _PREC['not'])}"
    if op == "neg":
        return f"-{_child(e.args[0], _ATOM_PREC)}"
    p = _PREC[op]
    sym = _INFIX[op]
    if op in ("and", "or"):
        return f" {sym} ".join(_child(a, p + 1) for a in e.args)
    if op == "implies":  # right-associative
        return f"{_child(e.args[0], p + 1)} {sym} {_child(e.args[1], p)}"
    if op in ("lt", "le", "gt", "ge", "eq", "ne"):  # non-associative
        return f"{_child(e.args[0], p + 1)} {sym} {_child(e.args[1], p + 1)}"
    return f"{_child(e.args[0], p)} {sym} {_child(e.args[1], p + 1)}"


def _typed_names(items: tuple[PTypedName, ...], indent: str) -> list[str]:
    return [f"{indent}{t.name} : {t.sort}" for t in items]


def _labpreds(items: tuple[PLabeled, ...], indent: str) -> list[str]:
    return [f"{indent}@{p.label} {_fmt(p.expr)}" for p in items]


def _event_to_lines(ev: PEvent) -> list[str]:
    head = f"  event {ev.name}"
    if ev.refines:
        head += f" refines {ev.refines}"
    if ev.status:
        head += f" status {ev.status}"
    lines = [head]
    if ev.params:
        lines.append("  any")
        lines.extend(_typed_names(ev.params, "    "))
    if ev.guards:
        lines.append("  where")
        lines.extend(_labpreds(ev.guards, "    "))
    if ev.witnesses:
        lines.append("  with")
        lines.extend(f"    @{w.target} : {_fmt(w.expr)}" for w in ev.witnesses)
    if ev.actions:
        lines.append("  then")
        for a in ev.actions:
            if a.kind == "assign":
                lines.append(f"    @{a.label} {a.targets[0]} := {_fmt(a.exprs[0])}")
            elif a.kind == "suchthat":
                lines.append(
                    f"    @{a.label} {', '.join(a.targets)} :| {_fmt(a.exprs[0])}"
                )
            else:
                lines.append(
                    f"    @{a.label} {a.targets[0]} :∈ {_fmt(a.exprs[0])} .. {_fmt(a.exprs[1])}"
                )
    lines.append("  end")
    return lines


def decl_to_source(decl: PDecl) -> str:
    lines: list[str] = []
    if isinstance(decl, PContext):
        head = f"context {decl.name}"
        if decl.extends:
            head += f" extends {decl.extends}"
        lines.append(head)
        lines.append("constants")
        lines.extend(_typed_names(decl.constants, "  "))
        if decl.axioms:
            lines.append("axioms")
            lines.extend(_labpreds(decl.axioms, "  "))
        if decl.theorems:
            lines.append("theorems")
            lines.extend(_labpreds(decl.theorems, "  "))
        lines.append("end")
    else:
        head = f"machine {decl.name}"
        if decl.refines:
            head += f" refines {decl.refines}"
        head += f" sees {decl.sees}"
        lines.append(head)
        lines.append("variables")
        lines.extend(_typed_names(decl.variables, "  "))
        lines.append("invariants")
        lines.extend(_labpreds(decl.invariants, "  "))
        if decl.variant is not None:
            lines.append(f"variant {_fmt(decl.variant)}")
        lines.append("events")
        for ev in decl.events:
            lines.extend(_event_to_lines(ev))
        lines.append("end")
    return "\n".join(lines) + "\n"


def to_source(decls: tuple[PDecl, ...]) -> str:
    return "\n".join(decl_to_source(d) for d in decls)
