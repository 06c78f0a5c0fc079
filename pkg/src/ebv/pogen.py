"""Proof-obligation generation.

Every machine and context compiles to a deterministic, ordered list of
sequents.  The complete formula table lives in ``docs/po-formulas.md``;
the short version:

  THM   context theorem from axioms and earlier theorems
  INIT  initialisation establishes each invariant
  INV   every event preserves each invariant of its machine
  FIS   a nonempty action admits some after-state
  GRD   a refining event's guards entail each abstract guard
  SIM   the concrete transition entails the abstract one
  VAR   convergent events decrease the variant, anticipated ones do
        not increase it
  NAT   the variant is non-negative whenever a variant-bound event is
        enabled (an extension beyond the classical table: a decreasing
        integer only forces termination when bounded below; disable
        with include_nat=False / --no-nat-po)
  WFIS  each witness predicate is satisfiable

Hypotheses are ordered: axioms, context theorems, abstraction-chain
invariants, own invariants, guards, witnesses, before-after predicates.
Initialisation obligations drop all before-state hypotheses.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import expr as ex
from .diagnostics import Position
from .expr import Expr, Sort, free_symbol_sorts, prime_frame, substitute
from .model import BAssignment, Context, Event, Machine, Status, TypedModel

KINDS = ("THM", "INV", "INIT", "FIS", "GRD", "SIM", "VAR", "NAT", "WFIS")

_KIND_RANK = {"const": 0, "var": 1, "primed": 2, "param": 3}


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    kind: str  # const | var | primed | param  (consts of sort fun are functions)
    sort: Sort


@dataclass(frozen=True)
class PlainGoal:
    body: Expr


@dataclass(frozen=True)
class ExistentialGoal:
    bound: tuple[tuple[str, Sort], ...]  # names may carry a prime tick
    body: Expr


Goal = PlainGoal | ExistentialGoal


@dataclass(frozen=True)
class ProofObligation:
    id: str
    kind: str
    hypotheses: tuple[tuple[str, Expr], ...]
    goal: Goal
    symbols: tuple[SymbolDecl, ...]
    provenance: tuple[Position, ...] = ()


def complete_frame(action: BAssignment, machine_vars: tuple[tuple[str, Sort], ...]) -> Expr:
    """Conjoin ``x' = x`` for every machine variable the action leaves alone.

    Equalities follow variable declaration order; a literal-true predicate
    (an action-free event) contributes nothing.
    """
    parts: list[Expr] = []
    if action.predicate != ex.TRUE:
        parts.append(action.predicate)
    for name, sort in machine_vars:
        if name not in action.frame:
            parts.append(ex.eq(ex.primed(name, sort), ex.ref("var", name, sort)))
    return ex.and_(*parts)


def skip_action() -> BAssignment:
    return BAssignment(frozenset(), ex.TRUE)


def is_syntactic_tautology(po: ProofObligation) -> bool:
    """True when the goal literally appears among the hypotheses."""
    if not isinstance(po.goal, PlainGoal):
        return False
    return any(h == po.goal.body for _, h in po.hypotheses)


def _symbols(hyps: list[tuple[str, Expr]], goal: Goal) -> tuple[SymbolDecl, ...]:
    exprs = [h for _, h in hyps]
    skip: set[str] = set()
    if isinstance(goal, ExistentialGoal):
        skip = {n for n, _ in goal.bound}
        exprs.append(goal.body)
    else:
        exprs.append(goal.body)
    table = free_symbol_sorts(exprs)
    decls = [
        SymbolDecl(name, kind, sort)
        for (name, kind), sort in table.items()
        if ex.sym_key(name, kind) not in skip
    ]
    decls.sort(key=lambda d: (_KIND_RANK[d.kind], d.name))
    return tuple(decls)


def sequent(id_: str, kind: str, hyps: list[tuple[str, Expr]], goal: Goal,
            provenance: tuple[Position | None, ...] = ()) -> ProofObligation:
    """Build an obligation with its symbol table derived from the parts."""
    return ProofObligation(
        id_, kind, tuple(hyps), goal, _symbols(hyps, goal),
        tuple(p for p in provenance if p is not None),
    )


# ---------------------------------------------------------------------------
# Contexts


def gen_context_pos(ctx: Context, model: TypedModel) -> list[ProofObligation]:
    """One THM obligation per theorem, from axioms and earlier theorems."""
    base: list[tuple[str, Expr]] = []
    for c in model.context_chain(ctx)[:-1]:
        base += [(f"{c.name}/{a.label}", a.body) for a in c.axioms]
        base += [(f"{c.name}/{t.label}", t.body) for t in c.theorems]
    base += [(f"{ctx.name}/{a.label}", a.body) for a in ctx.axioms]
    pos = []
    for i, thm in enumerate(ctx.theorems):
        hyps = base + [(f"{ctx.name}/{t.label}", t.body) for t in ctx.theorems[:i]]
        pos.append(sequent(f"{ctx.name}/{thm.label}/THM", "THM", hyps,
                       PlainGoal(thm.body), (thm.pos,)))
    return pos


# ---------------------------------------------------------------------------
# Machines


class _MachineEnv:
    """Shared hypothesis material for one machine's obligations."""

    def __init__(self, m: Machine, model: TypedModel):
        self.m = m
        self.model = model
        self.axioms = [(f"{cn}/{a.label}", a.body)
                       for cn, a in model.visible_axioms(m)]
        self.theorems = [(f"{cn}/{t.label}", t.body)
                         for cn, t in model.visible_theorems(m)]
        self.chain = model.machine_chain(m)
        self.abstract = self.chain[-1] if self.chain else None
        self.chain_invs = [(f"{a.name}/{i.label}", i.body)
                           for a in self.chain for i in a.invariants]
        self.own_invs = [(f"{m.name}/{i.label}", i.body) for i in m.invariants]
        # Prime every variable in scope: the machine's own plus anything
        # inherited from the chain (dropped variables included; witnesses
        # pin their primes).
        all_vars: dict[str, Sort] = {}
        for a in self.chain:
            all_vars.update(a.variables)
        all_vars.update(m.variables)
        self.prime_all = prime_frame(tuple(all_vars.items()))
        self.prime_own = prime_frame(m.variables)

    def guards(self, e: Event) -> list[tuple[str, Expr]]:
        return [(f"guard/{g.label}", g.body) for g in e.guards]

    def witnesses(self, e: Event) -> list[tuple[str, Expr]]:
        return [(f"witness/{w.target}", w.predicate) for w in e.witnesses]

    def concrete_ba(self, e: Event) -> tuple[str, Expr]:
        return ("action", complete_frame(e.action, self.m.variables))

    def abstract_ba(self, e: Event) -> tuple[str, Expr] | None:
        """The refined event's completed action, skip for new events."""
        if self.abstract is None:
            return None
        if e.refines is None:
            action = skip_action()
        else:
            action = self.abstract.event(e.refines).action
        return ("abstract/action", complete_frame(action, self.abstract.variables))

    def common(self, e: Event, with_witnesses: bool = True) -> list[tuple[str, Expr]]:
        hyps = self.axioms + self.theorems + self.chain_invs + self.own_invs
        hyps += self.guards(e)
        if with_witnesses:
            hyps += self.witnesses(e)
        return hyps

    def init_common(self, e: Event) -> list[tuple[str, Expr]]:
        # No before-state: invariant and guard hypotheses would talk about
        # values that do not exist yet.
        return self.axioms + self.theorems + self.witnesses(e)


def gen_machine_pos(m: Machine, model: TypedModel,
                    include_nat: bool = True) -> list[ProofObligation]:
    env = _MachineEnv(m, model)
    pos: list[ProofObligation] = []
    events = [e for e in m.events if not e.is_init()]
    init = m.init()

    if env.abstract is not None:
        pos += _grd_pos(env)
        pos += _sim_pos(env)
        pos += _wfis_pos(env)

    # INIT: the initialisation establishes each invariant of this machine.
    init_hyps = env.init_common(init) + [env.concrete_ba(init)]
    aba = env.abstract_ba(init)
    if aba is not None:
        init_hyps.append(aba)
    for inv in m.invariants:
        pos.append(sequent(
            f"{m.name}/{init.name}/{inv.label}/INIT", "INIT", init_hyps,
            PlainGoal(substitute(inv.body, env.prime_all)),
            (init.pos, inv.pos),
        ))

    # INV: every other event preserves each invariant of this machine.
    for e in events:
        hyps = env.common(e) + [env.concrete_ba(e)]
        aba = env.abstract_ba(e)
        if aba is not None:
            hyps.append(aba)
        for inv in m.invariants:
            pos.append(sequent(
                f"{m.name}/{e.name}/{inv.label}/INV", "INV", hyps,
                PlainGoal(substitute(inv.body, env.prime_all)),
                (e.pos, inv.pos),
            ))

    # FIS: nonempty actions admit an after-state.
    for e in m.events:
        if not e.action.frame:
            continue
        if e.is_init():
            hyps = env.axioms + env.theorems
        else:
            hyps = env.common(e, with_witnesses=False)
        bound = tuple((f"{n}'", s) for n, s in m.variables if n in e.action.frame)
        pos.append(sequent(f"{m.name}/{e.name}/FIS", "FIS", hyps,
                       ExistentialGoal(bound, e.action.predicate), (e.pos,)))

    # VAR / NAT: variant obligations for convergent and anticipated events.
    if m.variant is not None:
        variant_after = substitute(m.variant, env.prime_own)
        for e in events:
            if e.status is Status.ORDINARY:
                continue
            hyps = env.common(e) + [env.concrete_ba(e)]
            rel = ex.lt if e.status is Status.CONVERGENT else ex.le
            pos.append(sequent(f"{m.name}/{e.name}/VAR", "VAR", hyps,
                           PlainGoal(rel(variant_after, m.variant)), (e.pos,)))
        if include_nat:
            for e in events:
                if e.status is Status.ORDINARY:
                    continue
                hyps = env.common(e, with_witnesses=False)
                pos.append(sequent(f"{m.name}/{e.name}/NAT", "NAT", hyps,
                               PlainGoal(ex.ge(m.variant, ex.intlit(0))), (e.pos,)))
    return pos


def _grd_pos(env: _MachineEnv) -> list[ProofObligation]:
    """Concrete guards entail each abstract guard (witnesses in scope)."""
    pos = []
    for e in env.m.events:
        if e.refines is None or e.is_init():
            continue
        abs_event = env.abstract.event(e.refines)
        for g in abs_event.guards:
            pos.append(sequent(
                f"{env.m.name}/{e.name}/{g.label}/GRD", "GRD",
                env.common(e), PlainGoal(g.body), (e.pos, g.pos),
            ))
    return pos


def _sim_pos(env: _MachineEnv) -> list[ProofObligation]:
    """The concrete transition entails the (completed) abstract one.

    Retained variables and parameters are identified by name; dropped
    primed variables are pinned by witness hypotheses.  Events refining
    nothing simulate skip over the abstract variables.
    """
    pos = []
    for e in env.m.events:
        if e.is_init():
            hyps = env.init_common(e) + [env.concrete_ba(e)]
        else:
            hyps = env.common(e) + [env.concrete_ba(e)]
        goal = env.abstract_ba(e)[1]
        pos.append(sequent(f"{env.m.name}/{e.name}/SIM", "SIM", hyps,
                       PlainGoal(goal), (e.pos,)))
    return pos


def _wfis_pos(env: _MachineEnv) -> list[ProofObligation]:
    """Each witness admits a value for the symbol it reconstructs."""
    pos = []
    for e in env.m.events:
        for w in e.witnesses:
            if e.is_init():
                hyps = env.axioms + env.theorems
            else:
                hyps = env.common(e, with_witnesses=False)
            hyps = hyps + [(f"witness/{o.target}", o.predicate)
                           for o in e.witnesses if o.target != w.target]
            sort = _witness_sort(env, e, w.target)
            pos.append(sequent(
                f"{env.m.name}/{e.name}/{w.target}/WFIS", "WFIS", hyps,
                ExistentialGoal(((w.target, sort),), w.predicate),
                (e.pos, w.pos),
            ))
    return pos


def _witness_sort(env: _MachineEnv, e: Event, target: str) -> Sort:
    if target.endswith("'"):
        return dict(env.abstract.variables)[target[:-1]]
    abs_event = env.abstract.event(e.refines)
    return dict(abs_event.params)[target]


def gen_abstract_machine_pos(m: Machine, model: TypedModel,
                             include_nat: bool = True) -> list[ProofObligation]:
    if m.refines is not None:
        raise ValueError(f"{m.name} is a refinement machine")
    return gen_machine_pos(m, model, include_nat=include_nat)


def gen_refinement_pos(m: Machine, model: TypedModel,
                       include_nat: bool = True) -> list[ProofObligation]:
    if m.refines is None:
        raise ValueError(f"{m.name} refines nothing")
    return gen_machine_pos(m, model, include_nat=include_nat)


# ---------------------------------------------------------------------------
# Whole projects


def gen_project_pos(model: TypedModel,
                    include_nat: bool = True) -> list[ProofObligation]:
    """All obligations: contexts in declaration order, then machines with
    every abstraction preceding its refinements."""
    pos: list[ProofObligation] = []
    for ctx in model.contexts:
        pos += gen_context_pos(ctx, model)
    for m in model.machines:
        pos += gen_machine_pos(m, model, include_nat=include_nat)
    ids = [p.id for p in pos]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise AssertionError(f"duplicate obligation ids: {dup}")
    return pos


def gen_frame_property_pos(model: TypedModel) -> list[ProofObligation]:
    """Synthetic checks that frame completion really freezes every
    variable an action does not assign: {completed action} |- x' = x."""
    pos = []
    for m in model.machines:
        for e in m.events:
            hyps = [("action", complete_frame(e.action, m.variables))]
            for name, sort in m.variables:
                if name in e.action.frame:
                    continue
                goal = ex.eq(ex.primed(name, sort), ex.ref("var", name, sort))
                pos.append(sequent(f"{m.name}/{e.name}/frame_{name}/SIM", "SIM",
                               hyps, PlainGoal(goal)))
    return pos
