"""Name resolution and sort checking: surface trees to typed models.

All checks the solver backend would otherwise trip over are front-loaded
here: unresolved names, ill-sorted expressions, frame violations, primed
references outside actions, missing variants for convergent events, and
witness coverage of disappearing abstract symbols.  Every rejection
produces a positioned diagnostic with a stable code; nothing is silently
repaired.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import diagnostics as dc
from . import expr as ex
from .diagnostics import Diagnostic, Position, error
from .expr import Expr, Sort
from .model import (
    INIT_EVENT,
    BAssignment,
    Context,
    Event,
    LabeledPredicate,
    Machine,
    Status,
    TypedModel,
    Witness,
)
from .parser import (
    PAction,
    PContext,
    PEvent,
    PExpr,
    PLabeled,
    PMachine,
    SourceUnit,
)

_SORTS = {"int": Sort.INT, "bool": Sort.BOOL, "fun": Sort.FUN}
_STATUS = {
    None: Status.ORDINARY,
    "ordinary": Status.ORDINARY,
    "convergent": Status.CONVERGENT,
    "anticipated": Status.ANTICIPATED,
}


class _ExprFailed(Exception):
    """Internal: expression already reported, stop checking it."""


@dataclass
class _Scope:
    """Name environment for one expression position."""

    symbols: dict[str, tuple[str, Sort]]  # name -> (kind, sort); kind var/param/const/fun
    primed: dict[str, Sort] = field(default_factory=dict)  # names usable primed
    where: str = "expression"


class _Checker:
    def __init__(self) -> None:
        self.diags: list[Diagnostic] = []

    def err(self, pos: Position | None, code: str, msg: str) -> None:
        self.diags.append(error(pos or Position("<unknown>", 0, 0), code, msg))

    # -- expression resolution ----------------------------------------------

    def expr(self, p: PExpr, scope: _Scope, bound: dict[str, Sort]) -> Expr:
        op = p.op
        if op == "int":
            return ex.intlit(p.value)
        if op == "true":
            return ex.TRUE
        if op == "false":
            return ex.FALSE
        if op == "name":
            if p.name in bound:
                return ex.var(p.name, bound[p.name])
            sym = scope.symbols.get(p.name)
            if sym is None:
                self.err(p.pos, dc.UNRESOLVED_NAME,
                         f"unknown name '{p.name}' in {scope.where}")
                raise _ExprFailed
            kind, sort = sym
            if kind == "fun":
                self.err(p.pos, dc.SORT_MISMATCH,
                         f"function constant '{p.name}' must be applied to an argument")
                raise _ExprFailed
            return ex.ref(kind, p.name, sort)
        if op == "primed":
            if p.name not in scope.primed:
                if p.name in bound or p.name in scope.symbols:
                    self.err(p.pos, dc.PRIMED_NOT_ALLOWED,
                             f"primed reference {p.name}' is not allowed in {scope.where}")
                else:
                    self.err(p.pos, dc.UNRESOLVED_NAME,
                             f"unknown name '{p.name}' in {scope.where}")
                raise _ExprFailed
            return ex.primed(p.name, scope.primed[p.name])
        if op == "apply":
            sym = scope.symbols.get(p.name)
            if sym is None:
                self.err(p.pos, dc.UNRESOLVED_NAME,
                         f"unknown function '{p.name}' in {scope.where}")
                raise _ExprFailed
            if sym[0] != "fun":
                self.err(p.pos, dc.SORT_MISMATCH, f"'{p.name}' is not a function")
                raise _ExprFailed
            arg = self.want(p.args[0], scope, bound, Sort.INT)
            return ex.apply(p.name, arg)
        if op == "neg":
            return ex.neg(self.want(p.args[0], scope, bound, Sort.INT))
        if op in ex.ARITH_OPS:
            return ex.arith(op, self.want(p.args[0], scope, bound, Sort.INT),
                            self.want(p.args[1], scope, bound, Sort.INT))
        if op in ex.CMP_OPS:
            return ex.cmp(op, self.want(p.args[0], scope, bound, Sort.INT),
                          self.want(p.args[1], scope, bound, Sort.INT))
        if op in ("eq", "ne"):
            a = self.expr(p.args[0], scope, bound)
            b = self.expr(p.args[1], scope, bound)
            if a.sort is not b.sort:
                self.err(p.pos, dc.SORT_MISMATCH,
                         f"'=' operands have different sorts "
                         f"({a.sort.value} vs {b.sort.value})")
                raise _ExprFailed
            return ex.eq(a, b) if op == "eq" else ex.ne(a, b)
        if op == "not":
            return ex.not_(self.want(p.args[0], scope, bound, Sort.BOOL))
        if op in ("and", "or"):
            parts = [self.want(a, scope, bound, Sort.BOOL) for a in p.args]
            return ex.and_(*parts) if op == "and" else ex.or_(*parts)
        if op == "implies":
            return ex.implies(self.want(p.args[0], scope, bound, Sort.BOOL),
                              self.want(p.args[1], scope, bound, Sort.BOOL))
        if op == "iff":
            return ex.iff(self.want(p.args[0], scope, bound, Sort.BOOL),
                          self.want(p.args[1], scope, bound, Sort.BOOL))
        if op in ("forall", "exists"):
            inner = dict(bound)
            bs: list[tuple[str, Sort]] = []
            for name, sortname in p.bound:
                if name in inner or name in scope.symbols:
                    self.err(p.pos, dc.SHADOWED_BINDER,
                             f"bound variable '{name}' shadows another symbol")
                    raise _ExprFailed
                sort = _SORTS[sortname]
                inner[name] = sort
                bs.append((name, sort))
            body = self.want(p.args[0], scope, inner, Sort.BOOL)
            return ex.quant(op, bs, body)
        raise AssertionError(f"unhandled surface node {op!r}")

    def want(self, p: PExpr, scope: _Scope, bound: dict[str, Sort], sort: Sort) -> Expr:
        e = self.expr(p, scope, bound)
        if e.sort is not sort:
            self.err(p.pos, dc.SORT_MISMATCH,
                     f"expected {sort.value} expression, got {e.sort.value}"
                     f" in {scope.where}")
            raise _ExprFailed
        return e

    def checked(self, p: PExpr, scope: _Scope, sort: Sort) -> Expr | None:
        try:
            return self.want(p, scope, {}, sort)
        except _ExprFailed:
            return None

    # -- labelled predicate lists -------------------------------------------

    def labpreds(self, items: tuple[PLabeled, ...], scope: _Scope,
                 what: str) -> tuple[LabeledPredicate, ...]:
        seen: set[str] = set()
        out: list[LabeledPredicate] = []
        for item in items:
            if item.label in seen:
                self.err(item.pos, dc.DUPLICATE_LABEL,
                         f"duplicate {what} label '@{item.label}'")
                continue
            seen.add(item.label)
            body = self.checked(item.expr, scope, Sort.BOOL)
            if body is not None:
                out.append(LabeledPredicate(item.label, body, item.pos))
        return tuple(out)


def resolve_and_typecheck(
    units: list[SourceUnit],
) -> tuple[TypedModel | None, list[Diagnostic]]:
    """Resolve and sort-check parsed units into one typed project."""
    ck = _Checker()

    pctxs: list[PContext] = []
    pmachs: list[PMachine] = []
    names: dict[str, Position | None] = {}
    for unit in units:
        for d in unit.declarations:
            if d.name in names:
                ck.err(d.pos, dc.DUPLICATE_NAME,
                       f"'{d.name}' is already declared")
                continue
            names[d.name] = d.pos
            if isinstance(d, PContext):
                pctxs.append(d)
            else:
                pmachs.append(d)

    ctx_by_name = {c.name: c for c in pctxs}
    contexts: dict[str, Context] = {}
    # Base contexts first so an extending context can see its parent.
    for p in [c for c in pctxs if c.extends is None] + \
             [c for c in pctxs if c.extends is not None]:
        contexts[p.name] = _check_context(ck, p, ctx_by_name, contexts)

    machines = _check_machines(ck, pmachs, contexts)

    if any(d.severity == "error" for d in ck.diags):
        return None, ck.diags
    ordered_ctxs = tuple(contexts[c.name] for c in pctxs)
    return TypedModel(ordered_ctxs, machines), ck.diags


def _check_context(ck: _Checker, p: PContext,
                   ctx_by_name: dict[str, PContext],
                   done: dict[str, Context]) -> Context:
    parent_consts: dict[str, tuple[str, Sort]] = {}
    extends = p.extends
    if extends is not None:
        parent = ctx_by_name.get(extends)
        if parent is None:
            ck.err(p.pos, dc.UNRESOLVED_NAME,
                   f"context '{p.name}' extends unknown context '{extends}'")
            extends = None
        elif parent.extends is not None:
            ck.err(p.pos, dc.EXTENDS_TOO_DEEP,
                   f"context '{extends}' already extends another context; "
                   "chains deeper than one level are not supported")
            extends = None
        elif parent.name in done:
            for n, s in done[parent.name].constants:
                parent_consts[n] = ("fun" if s is Sort.FUN else "const", s)

    consts: list[tuple[str, Sort]] = []
    symbols = dict(parent_consts)
    for tn in p.constants:
        if tn.name in symbols:
            ck.err(tn.pos, dc.DUPLICATE_NAME, f"constant '{tn.name}' is already declared")
            continue
        sort = _SORTS[tn.sort]
        symbols[tn.name] = ("fun" if sort is Sort.FUN else "const", sort)
        consts.append((tn.name, sort))

    scope = _Scope(symbols, {}, f"context '{p.name}'")
    axioms = ck.labpreds(p.axioms, scope, "axiom")
    theorems = ck.labpreds(p.theorems, scope, "theorem")
    return Context(p.name, extends, tuple(consts), axioms, theorems, p.pos)


def _check_machines(ck: _Checker, pmachs: list[PMachine],
                    contexts: dict[str, Context]) -> tuple[Machine, ...]:
    by_name = {m.name: m for m in pmachs}
    done: dict[str, Machine] = {}
    order: list[Machine] = []
    pending = list(pmachs)
    while pending:
        progressed = False
        for p in list(pending):
            if p.refines is not None and p.refines not in done:
                target = by_name.get(p.refines)
                if target is None or target is p:
                    ck.err(p.pos, dc.REFINES_UNKNOWN,
                           f"machine '{p.name}' refines unknown machine '{p.refines}'")
                    pending.remove(p)
                    progressed = True
                continue
            m = _check_machine(ck, p, contexts, done)
            done[m.name] = m
            order.append(m)
            pending.remove(p)
            progressed = True
        if not progressed:
            for p in pending:  # refinement cycle
                ck.err(p.pos, dc.REFINES_UNKNOWN,
                       f"machine '{p.name}' is part of a refinement cycle")
            break
    return tuple(order)


def _ctx_chain_names(contexts: dict[str, Context], name: str) -> set[str]:
    out = set()
    while name in contexts:
        out.add(name)
        parent = contexts[name].extends
        if parent is None or parent in out:
            break
        name = parent
    return out


def _check_machine(ck: _Checker, p: PMachine, contexts: dict[str, Context],
                   done: dict[str, Machine]) -> Machine:
    sees = p.sees
    const_syms: dict[str, tuple[str, Sort]] = {}
    if sees not in contexts:
        ck.err(p.pos, dc.UNRESOLVED_NAME,
               f"machine '{p.name}' sees unknown context '{sees}'")
    else:
        chain = []
        c = contexts[sees]
        while True:
            chain.insert(0, c)
            if c.extends is None or c.extends not in contexts:
                break
            c = contexts[c.extends]
        for c in chain:
            for n, s in c.constants:
                const_syms[n] = ("fun" if s is Sort.FUN else "const", s)

    abstract = done.get(p.refines) if p.refines else None
    if abstract is not None and sees in contexts:
        if abstract.sees not in _ctx_chain_names(contexts, sees):
            ck.err(p.pos, dc.SEES_MISMATCH,
                   f"machine '{p.name}' must see '{abstract.sees}' "
                   f"(or a context extending it) like its abstraction")

    # Variables of the abstraction chain, nearest declaration winning.
    chain_vars: dict[str, Sort] = {}
    anc = abstract
    ancestors: list[Machine] = []
    while anc is not None:
        ancestors.append(anc)
        for n, s in anc.variables:
            chain_vars.setdefault(n, s)
        anc = done.get(anc.refines) if anc.refines else None

    own_vars: list[tuple[str, Sort]] = []
    for tn in p.variables:
        sort = _SORTS[tn.sort]
        if sort is Sort.FUN:
            ck.err(tn.pos, dc.FUN_SORT_NOT_ALLOWED,
                   f"variable '{tn.name}' cannot have sort fun")
            continue
        if any(n == tn.name for n, _ in own_vars):
            ck.err(tn.pos, dc.DUPLICATE_VARIABLE,
                   f"variable '{tn.name}' is already declared")
            continue
        if tn.name in const_syms:
            ck.err(tn.pos, dc.DUPLICATE_NAME,
                   f"variable '{tn.name}' collides with a constant")
            continue
        if tn.name in chain_vars and chain_vars[tn.name] is not sort:
            ck.err(tn.pos, dc.SORT_MISMATCH,
                   f"retained variable '{tn.name}' changes sort from "
                   f"{chain_vars[tn.name].value} to {sort.value}")
            continue
        own_vars.append((tn.name, sort))

    own_var_sorts = dict(own_vars)
    disappearing = {n: s for n, s in (abstract.variables if abstract else ())
                    if n not in own_var_sorts}

    # Symbols readable in this machine's predicates: constants, own
    # variables, and (read-only) every abstraction-chain variable.
    machine_syms: dict[str, tuple[str, Sort]] = dict(const_syms)
    for n, s in chain_vars.items():
        machine_syms[n] = ("var", s)
    for n, s in own_vars:
        machine_syms[n] = ("var", s)

    inv_scope = _Scope(machine_syms, {}, f"invariants of '{p.name}'")
    invariants = ck.labpreds(p.invariants, inv_scope, "invariant")

    variant: Expr | None = None
    if p.variant is not None:
        vscope = _Scope(machine_syms, {}, f"variant of '{p.name}'")
        variant = ck.checked(p.variant, vscope, Sort.INT)
        if variant is not None:
            # VAR obligations prime only this machine's variables, so a
            # variant over inherited-but-dropped variables would never see
            # its after value.
            bad = {n for n, k in ex.free_symbols(variant)
                   if k == "var" and n not in own_var_sorts}
            if bad:
                ck.err(p.pos, dc.VARIANT_SCOPE,
                       f"variant of '{p.name}' uses non-local variables {sorted(bad)}")
                variant = None

    events: list[Event] = []
    seen_events: set[str] = set()
    for pe in p.events:
        if pe.name in seen_events:
            ck.err(pe.pos, dc.DUPLICATE_NAME,
                   f"event '{pe.name}' is already declared")
            continue
        seen_events.add(pe.name)
        ev = _check_event(ck, pe, p, machine_syms, own_var_sorts,
                          disappearing, abstract)
        if ev is not None:
            events.append(ev)

    if INIT_EVENT not in seen_events:
        ck.err(p.pos, dc.MISSING_INIT,
               f"machine '{p.name}' has no '{INIT_EVENT}' event")

    if variant is None:
        for ev in events:
            if ev.status is Status.CONVERGENT:
                ck.err(ev.pos, dc.MISSING_VARIANT,
                       f"convergent event '{ev.name}' needs a machine variant")

    return Machine(p.name, sees, p.refines, tuple(own_vars), invariants,
                   variant, tuple(events), p.pos)


def _check_event(ck: _Checker, pe: PEvent, pm: PMachine,
                 machine_syms: dict[str, tuple[str, Sort]],
                 own_vars: dict[str, Sort],
                 disappearing_vars: dict[str, Sort],
                 abstract: Machine | None) -> Event | None:
    status = _STATUS[pe.status]
    is_init = pe.name == INIT_EVENT

    refines = pe.refines
    abstract_event: Event | None = None
    if is_init:
        if refines not in (None, INIT_EVENT):
            ck.err(pe.pos, dc.INIT_MALFORMED,
                   f"'{INIT_EVENT}' can only refine '{INIT_EVENT}'")
        refines = INIT_EVENT if abstract is not None else None
        if pe.status not in (None, "ordinary"):
            ck.err(pe.pos, dc.INIT_MALFORMED, f"'{INIT_EVENT}' must be ordinary")
            status = Status.ORDINARY
        if pe.guards:
            ck.err(pe.pos, dc.INIT_MALFORMED, f"'{INIT_EVENT}' cannot have guards")
        if pe.params:
            ck.err(pe.pos, dc.INIT_MALFORMED, f"'{INIT_EVENT}' cannot have parameters")
    if refines is not None:
        if abstract is None:
            ck.err(pe.pos, dc.REFINES_UNKNOWN,
                   f"event '{pe.name}' refines '{refines}' but machine "
                   f"'{pm.name}' refines no machine")
            refines = None
        else:
            try:
                abstract_event = abstract.event(refines)
            except KeyError:
                ck.err(pe.pos, dc.REFINES_UNKNOWN,
                       f"event '{pe.name}' refines unknown abstract event '{refines}'")
                refines = None

    params: list[tuple[str, Sort]] = []
    for tn in pe.params:
        sort = _SORTS[tn.sort]
        if sort is Sort.FUN:
            ck.err(tn.pos, dc.FUN_SORT_NOT_ALLOWED,
                   f"parameter '{tn.name}' cannot have sort fun")
            continue
        if any(n == tn.name for n, _ in params) or tn.name in machine_syms:
            ck.err(tn.pos, dc.DUPLICATE_NAME,
                   f"parameter '{tn.name}' collides with another symbol")
            continue
        params.append((tn.name, sort))

    event_syms = dict(machine_syms)
    for n, s in params:
        event_syms[n] = ("param", s)

    guard_scope = _Scope(event_syms, {}, f"guards of event '{pe.name}'")
    guards = ck.labpreds(pe.guards, guard_scope, "guard")

    # Identified abstract parameters must keep their sorts; the rest
    # disappear and need witnesses.
    param_sorts = dict(params)
    disappearing: dict[str, Sort] = {}
    if abstract_event is not None:
        for n, s in abstract_event.params:
            if n in param_sorts:
                if param_sorts[n] is not s:
                    ck.err(pe.pos, dc.SORT_MISMATCH,
                           f"parameter '{n}' of '{pe.name}' changes sort from "
                           f"the abstract event's {s.value}")
            else:
                disappearing[n] = s
        # Every dropped abstract variable occurs primed in the simulation
        # goal (through frame completion if the abstract event leaves it
        # alone), so each one needs a witness in every refining event.
        for n, s in disappearing_vars.items():
            disappearing[n + "'"] = s

    witnesses: list[Witness] = []
    seen_targets: set[str] = set()
    for pw in pe.witnesses:
        if abstract_event is None:
            ck.err(pw.pos, dc.WITNESS_NOT_ALLOWED,
                   f"event '{pe.name}' refines nothing, witness '@{pw.target}' is meaningless")
            continue
        if pw.target in seen_targets:
            ck.err(pw.pos, dc.DUPLICATE_WITNESS,
                   f"duplicate witness for '{pw.target}'")
            continue
        if pw.target not in disappearing:
            ck.err(pw.pos, dc.UNKNOWN_WITNESS_TARGET,
                   f"'{pw.target}' is not a disappearing abstract symbol of '{pe.name}'")
            continue
        seen_targets.add(pw.target)
        tsort = disappearing[pw.target]
        wsyms = dict(event_syms)
        wprimed = dict(own_vars)
        if pw.target.endswith("'"):
            wprimed[pw.target[:-1]] = tsort
        else:
            wsyms[pw.target] = ("param", tsort)
        wscope = _Scope(wsyms, wprimed, f"witness '@{pw.target}' of event '{pe.name}'")
        try:
            body = ck.want(pw.expr, wscope, {}, Sort.BOOL)
        except _ExprFailed:
            continue
        witnesses.append(Witness(pw.target, body, pw.pos))

    for target in disappearing:
        if target not in seen_targets:
            ck.err(pe.pos, dc.MISSING_WITNESS,
                   f"event '{pe.name}' needs a witness for disappearing '{target}'")

    action = _check_actions(ck, pe, event_syms, own_vars, is_init)

    return Event(pe.name, status, tuple(params), guards, action, refines,
                 tuple(witnesses), pe.pos)


def _check_actions(ck: _Checker, pe: PEvent,
                   event_syms: dict[str, tuple[str, Sort]],
                   own_vars: dict[str, Sort], is_init: bool) -> BAssignment:
    frame: list[str] = []
    preds: list[Expr] = []
    labels: set[str] = set()
    for pa in pe.actions:
        if pa.label in labels:
            ck.err(pa.pos, dc.DUPLICATE_LABEL,
                   f"duplicate action label '@{pa.label}'")
            continue
        labels.add(pa.label)
        ok = True
        for t in pa.targets:
            if t not in own_vars:
                ck.err(pa.pos, dc.FRAME_VIOLATION,
                       f"action '@{pa.label}' assigns '{t}', which is not a "
                       f"variable of this machine")
                ok = False
            elif t in frame:
                ck.err(pa.pos, dc.DUPLICATE_ASSIGNMENT,
                       f"variable '{t}' is assigned by more than one action")
                ok = False
        if not ok:
            continue
        clause_frame = list(pa.targets)

        if pa.kind == "suchthat":
            # Resolve primed references to any machine variable, then
            # insist the frame covers what the predicate actually primes.
            scope = _Scope(event_syms, dict(own_vars),
                           f"action '@{pa.label}' of event '{pe.name}'")
            pred = _suchthat_pred(ck, pa, scope, set(clause_frame))
        else:
            # Right-hand sides are before-state expressions.
            scope = _Scope(event_syms, {},
                           f"action '@{pa.label}' of event '{pe.name}'")
            pred = _deterministic_pred(ck, pa, scope, own_vars)
        if pred is None:
            continue
        frame.extend(clause_frame)
        preds.append(pred)

    action = BAssignment(frozenset(frame), ex.and_(*preds) if preds else ex.TRUE)

    if is_init:
        reads = {n for n, k in ex.free_symbols(action.predicate) if k == "var"}
        if reads:
            ck.err(pe.pos, dc.INIT_MALFORMED,
                   f"'{INIT_EVENT}' reads current-state variables {sorted(reads)}")
    return action


def _suchthat_pred(ck: _Checker, pa: PAction, scope: _Scope,
                   frame: set[str]) -> Expr | None:
    try:
        pred = ck.want(pa.exprs[0], scope, {}, Sort.BOOL)
    except _ExprFailed:
        return None
    outside = {n for n, k in ex.free_symbols(pred)
               if k == "primed" and n not in frame}
    if outside:
        ck.err(pa.pos, dc.PRIMED_OUTSIDE_FRAME,
               f"action '@{pa.label}' constrains {sorted(outside)} "
               "primed but does not assign them")
        return None
    return pred


def _deterministic_pred(ck: _Checker, pa: PAction, scope: _Scope,
                        own_vars: dict[str, Sort]) -> Expr | None:
    target = pa.targets[0]
    tsort = own_vars[target]
    try:
        if pa.kind == "assign":
            rhs = ck.want(pa.exprs[0], scope, {}, tsort)
            return ex.eq(ex.primed(target, tsort), rhs)
        # x :∈ lo .. hi  desugars to  x :| x' >= lo and x' <= hi
        if tsort is not Sort.INT:
            ck.err(pa.pos, dc.SORT_MISMATCH,
                   f"':∈' needs an int variable, '{target}' is {tsort.value}")
            return None
        lo = ck.want(pa.exprs[0], scope, {}, Sort.INT)
        hi = ck.want(pa.exprs[1], scope, {}, Sort.INT)
    except _ExprFailed:
        return None
    pv = ex.primed(target, Sort.INT)
    return ex.and_(ex.ge(pv, lo), ex.le(pv, hi))
