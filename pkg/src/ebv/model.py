"""Typed model hierarchy: contexts, machines, events and actions.

Everything here is immutable after the frontend builds it, so models and
the proof obligations derived from them can be shared freely across
concurrent solver workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .diagnostics import Position
from .expr import TRUE, Expr, Sort, free_symbols, walk


class Status(enum.Enum):
    ORDINARY = "ordinary"
    CONVERGENT = "convergent"
    ANTICIPATED = "anticipated"


INIT_EVENT = "initialisation"


@dataclass(frozen=True)
class LabeledPredicate:
    label: str
    body: Expr
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class BAssignment:
    """A before-after predicate together with the variables it may assign."""

    frame: frozenset[str]
    predicate: Expr

    def primed_outside_frame(self) -> set[str]:
        """Primed names the predicate uses without framing them."""
        return {
            n.name
            for n in walk(self.predicate)
            if n.kind == "primed" and n.name not in self.frame
        } - _bound_primed(self.predicate)


def _bound_primed(e: Expr) -> set[str]:
    # Quantifiers never bind primed names, so nothing to subtract today;
    # kept as a function to make the frame check's intent explicit.
    return set()


@dataclass(frozen=True)
class Witness:
    """Reconstructs one disappearing abstract symbol in a refining event.

    ``target`` is either an abstract parameter name or a primed abstract
    variable name (with trailing apostrophe, e.g. ``"x'"``).
    """

    target: str
    predicate: Expr
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Event:
    name: str
    status: Status = Status.ORDINARY
    params: tuple[tuple[str, Sort], ...] = ()
    guards: tuple[LabeledPredicate, ...] = ()
    action: BAssignment = BAssignment(frozenset(), TRUE)
    refines: str | None = None
    witnesses: tuple[Witness, ...] = ()
    pos: Position | None = field(default=None, compare=False)

    def is_init(self) -> bool:
        return self.name == INIT_EVENT


@dataclass(frozen=True)
class Context:
    name: str
    extends: str | None = None
    constants: tuple[tuple[str, Sort], ...] = ()
    axioms: tuple[LabeledPredicate, ...] = ()
    theorems: tuple[LabeledPredicate, ...] = ()
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Machine:
    name: str
    sees: str
    refines: str | None = None
    variables: tuple[tuple[str, Sort], ...] = ()
    invariants: tuple[LabeledPredicate, ...] = ()
    variant: Expr | None = None
    events: tuple[Event, ...] = ()
    pos: Position | None = field(default=None, compare=False)

    def event(self, name: str) -> Event:
        for e in self.events:
            if e.name == name:
                return e
        raise KeyError(name)

    def init(self) -> Event:
        return self.event(INIT_EVENT)

    def var_names(self) -> set[str]:
        return {n for n, _ in self.variables}

    def var_sorts(self) -> dict[str, Sort]:
        return dict(self.variables)


@dataclass(frozen=True)
class TypedModel:
    """A resolved project: every name bound, every expression sorted."""

    contexts: tuple[Context, ...] = ()
    machines: tuple[Machine, ...] = ()

    def context(self, name: str) -> Context:
        for c in self.contexts:
            if c.name == name:
                return c
        raise KeyError(name)

    def machine(self, name: str) -> Machine:
        for m in self.machines:
            if m.name == name:
                return m
        raise KeyError(name)

    def context_chain(self, ctx: Context) -> list[Context]:
        """``ctx`` preceded by the context it extends, if any."""
        chain = [ctx]
        while chain[0].extends is not None:
            chain.insert(0, self.context(chain[0].extends))
        return chain

    def machine_chain(self, m: Machine) -> list[Machine]:
        """Abstraction ancestors of ``m``, most abstract first (``m`` excluded)."""
        chain: list[Machine] = []
        cur = m
        while cur.refines is not None:
            cur = self.machine(cur.refines)
            chain.insert(0, cur)
        return chain

    def visible_axioms(self, m: Machine) -> list[tuple[str, LabeledPredicate]]:
        """(context-name, axiom) pairs visible to ``m``, declaration order."""
        out = []
        for c in self.context_chain(self.context(m.sees)):
            out.extend((c.name, a) for a in c.axioms)
        return out

    def visible_theorems(self, m: Machine) -> list[tuple[str, LabeledPredicate]]:
        out = []
        for c in self.context_chain(self.context(m.sees)):
            out.extend((c.name, t) for t in c.theorems)
        return out


def assignment_respects_frame(a: BAssignment) -> bool:
    """The model-core action invariant: primed use implies framed."""
    return not a.primed_outside_frame()


def predicate_is_unprimed(e: Expr) -> bool:
    """No next-state references anywhere (guards, invariants, axioms)."""
    return all((name_kind[1] != "primed") for name_kind in free_symbols(e))
