"""Resolution and sort checking: accepted models and diagnostic codes."""

from hypothesis import given, settings
from hypothesis import strategies as st

from ebv import expr as ex
from ebv.expr import Sort
from ebv.model import (
    Status,
    assignment_respects_frame,
    predicate_is_unprimed,
)
from ebv.parser import parse
from ebv.typecheck import resolve_and_typecheck

BS_CONTEXT = """
context ctx
constants f : fun  n : int  v : int
axioms
  @axm1 n >= 1
  @axm2 forall (x:int, y:int). (1 <= x and x <= y and y <= n) => f(x) <= f(y)
  @axm3 exists (x:int). 1 <= x and x <= n and f(x) = v
theorems
  @thm1 n > 0
end
"""

BS_ABSTRACT = """
machine m0 sees ctx
variables r : int
invariants
  @inv1 r >= 0
events
  event initialisation
  then
    @act1 r :| r' >= 0
  end
  event progress status anticipated
  then
    @act1 r :| r' >= 0
  end
  event final
  where
    @grd1 f(r) = v
  end
end
"""

BS_REF1 = """
machine m1 refines m0 sees ctx
variables p : int  q : int  r : int
invariants
  @inv1 1 <= p and p <= n
  @inv2 1 <= q and q <= n
  @inv3 p <= r and r <= q
variant q - p
events
  event initialisation
  then
    @act1 p, q, r :| p' = 1 and q' = n and r' >= 1 and r' <= n
  end
  event inc refines progress status convergent
  where
    @grd1 f(r) < v
  then
    @act1 p := r + 1
    @act2 r :∈ r + 1 .. q
  end
  event final refines final
  where
    @grd1 f(r) = v
  end
end
"""


def check(*texts):
    units = []
    for i, text in enumerate(texts):
        unit, diags = parse(f"<t{i}>", text)
        assert diags == [], [str(d) for d in diags]
        units.append(unit)
    return resolve_and_typecheck(units)


def accepted(*texts):
    model, diags = check(*texts)
    assert model is not None, [str(d) for d in diags]
    return model


def codes_of(*texts):
    model, diags = check(*texts)
    assert model is None
    return [d.code for d in diags]


def test_binary_search_refinement_accepted():
    model = accepted(BS_CONTEXT, BS_ABSTRACT, BS_REF1)
    m1 = model.machine("m1")
    assert m1.variant is not None
    inc = m1.event("inc")
    assert inc.status is Status.CONVERGENT
    assert inc.refines == "progress"
    # merged action: frame {p, r}, predicate conjunction in clause order
    assert inc.action.frame == {"p", "r"}
    assert inc.action.predicate == ex.and_(
        ex.eq(ex.primed("p"), ex.add(ex.var("r"), ex.intlit(1))),
        ex.ge(ex.primed("r"), ex.add(ex.var("r"), ex.intlit(1))),
        ex.le(ex.primed("r"), ex.var("q")),
    )


def test_missing_variant_on_convergent_event():
    no_variant = BS_REF1.replace("variant q - p\n", "")
    codes = codes_of(BS_CONTEXT, BS_ABSTRACT, no_variant)
    assert codes == ["MISSING_VARIANT"]


def test_anticipated_without_variant_is_fine():
    # The abstract machine's progress event is anticipated and m0 has no
    # variant: convergence is deferred to the refinement.
    model = accepted(BS_CONTEXT, BS_ABSTRACT)
    assert model.machine("m0").variant is None


def test_primed_outside_frame():
    bad = BS_REF1.replace("@act1 p, q, r :|", "@act1 q :|")
    codes = codes_of(BS_CONTEXT, BS_ABSTRACT, bad)
    assert "PRIMED_OUTSIDE_FRAME" in codes


def test_unresolved_name():
    bad = BS_ABSTRACT.replace("f(r) = v", "g(r) = v")
    assert "UNRESOLVED_NAME" in codes_of(BS_CONTEXT, bad)


def test_sort_mismatch():
    bad = BS_ABSTRACT.replace("@inv1 r >= 0", "@inv1 r + 1")
    assert "SORT_MISMATCH" in codes_of(BS_CONTEXT, bad)


def test_frame_violation_unknown_variable():
    bad = BS_ABSTRACT.replace("@act1 r :| r' >= 0", "@act1 w :| r' >= 0", 1)
    assert "FRAME_VIOLATION" in codes_of(BS_CONTEXT, bad)


def test_duplicate_label():
    bad = BS_ABSTRACT.replace("@inv1 r >= 0", "@inv1 r >= 0\n  @inv1 r >= 0")
    assert "DUPLICATE_LABEL" in codes_of(BS_CONTEXT, bad)


def test_duplicate_declaration_name():
    assert "DUPLICATE_NAME" in codes_of(BS_CONTEXT, BS_CONTEXT, BS_ABSTRACT)


def test_primed_not_allowed_in_guards():
    bad = BS_ABSTRACT.replace("f(r) = v", "f(r') = v")
    assert "PRIMED_NOT_ALLOWED" in codes_of(BS_CONTEXT, bad)


def test_init_cannot_read_state():
    bad = BS_ABSTRACT.replace("@act1 r :| r' >= 0\n", "@act1 r :| r' >= r\n", 1)
    assert "INIT_MALFORMED" in codes_of(BS_CONTEXT, bad)


def test_missing_initialisation():
    bad = BS_ABSTRACT.replace("""  event initialisation
  then
    @act1 r :| r' >= 0
  end
""", "")
    assert "MISSING_INIT" in codes_of(BS_CONTEXT, bad)


WITNESS_MODEL = """
context wctx
constants c : int
axioms
  @axm1 c >= 1
end

machine w0 sees wctx
variables x : int
invariants
  @inv1 x >= 0
events
  event initialisation then @act1 x := 0 end
  event bump
  any k : int
  where
    @grd1 k >= 1
  then
    @act1 x := x + k
  end
end

machine w1 refines w0 sees wctx
variables y : int
invariants
  @inv1 y = x + 1
events
  event initialisation
  with
    @x' : x' = y' - 1
  then
    @act1 y := 1
  end
  event bump refines bump
  any j : int
  where
    @grd1 j >= 2
  with
    @k : k = j
    @x' : x' = y' - 1
  then
    @act1 y := y + j
  end
end
"""


def test_witness_model_accepted():
    model = accepted(WITNESS_MODEL)
    bump = model.machine("w1").event("bump")
    assert {w.target for w in bump.witnesses} == {"k", "x'"}


def test_missing_witness():
    bad = WITNESS_MODEL.replace("    @k : k = j\n", "")
    assert "MISSING_WITNESS" in codes_of(bad)


def test_unknown_witness_target():
    bad = WITNESS_MODEL.replace("@k : k = j", "@zz : zz = j")
    codes = codes_of(bad)
    assert "UNKNOWN_WITNESS_TARGET" in codes and "MISSING_WITNESS" in codes


def test_witness_on_unrefined_event_rejected():
    bad = WITNESS_MODEL.replace("event bump refines bump", "event bump2")
    codes = codes_of(bad)
    assert "WITNESS_NOT_ALLOWED" in codes


def test_variant_scope_rejects_dropped_variables():
    bad = WITNESS_MODEL.replace(
        "machine w1 refines w0 sees wctx\nvariables y : int\ninvariants\n  @inv1 y = x + 1\n",
        "machine w1 refines w0 sees wctx\nvariables y : int\ninvariants\n  @inv1 y = x + 1\nvariant x + y\n",
    )
    assert "VARIANT_SCOPE" in codes_of(bad)


def test_accepted_model_respects_core_invariants():
    model = accepted(BS_CONTEXT, BS_ABSTRACT, BS_REF1)
    for m in model.machines:
        for e in m.events:
            assert assignment_respects_frame(e.action)
            assert e.action.frame <= m.var_names()
            for g in e.guards:
                assert predicate_is_unprimed(g.body)
        for inv in m.invariants:
            assert predicate_is_unprimed(inv.body)


def test_bool_parameters_are_permitted():
    # Int and Bool parameters are both legal; the corpus happens to use
    # none of the Bool kind.
    model = accepted("""
context bc
constants n : int
end

machine bm sees bc
variables x : int
invariants
  @inv1 x >= 0
events
  event initialisation then @act1 x := 0 end
  event poke
  any up : bool  k : int
  where
    @grd1 (up and k > 0) or (not up and k = 0)
  then
    @act1 x := x + k
  end
end
""")
    poke = model.machine("bm").event("poke")
    assert dict(poke.params) == {"up": Sort.BOOL, "k": Sort.INT}


def test_determinism_of_diagnostics():
    bad = BS_ABSTRACT.replace("f(r) = v", "g(r) = x'")
    a = check(BS_CONTEXT, bad)[1]
    b = check(BS_CONTEXT, bad)[1]
    assert a == b


# -- random syntactically valid models never break core invariants ----------

_VAR_NAMES = ["u", "w", "z"]


@st.composite
def random_model_text(draw):
    nvars = draw(st.integers(1, 3))
    names = _VAR_NAMES[:nvars]
    lines = ["context rc", "constants cn : int", "end", "",
             "machine rm sees rc", "variables"]
    lines += [f"  {n} : int" for n in names]
    lines.append("invariants")
    for i in range(draw(st.integers(0, 2))):
        n = draw(st.sampled_from(names))
        k = draw(st.integers(-3, 3))
        lines.append(f"  @inv{i} {n} >= {k}")
    has_variant = draw(st.booleans())
    if has_variant:
        lines.append(f"variant {draw(st.sampled_from(names))} + cn")
    lines.append("events")
    lines.append("  event initialisation")
    lines.append("  then")
    lines.append("    @a0 " + ", ".join(names) + " :| " +
                 " and ".join(f"{n}' = {i}" for i, n in enumerate(names)))
    lines.append("  end")
    for i in range(draw(st.integers(0, 2))):
        status = draw(st.sampled_from(["ordinary", "convergent", "anticipated"]))
        if status == "convergent" and not has_variant:
            status = "ordinary"
        target = draw(st.sampled_from(names))
        other = draw(st.sampled_from(names + ["cn"]))
        lines.append(f"  event e{i} status {status}")
        if draw(st.booleans()):
            lines.append(f"  where\n    @g {target} < {other}")
        lines.append("  then")
        kind = draw(st.integers(0, 2))
        if kind == 0:
            lines.append(f"    @a {target} := {other} + 1")
        elif kind == 1:
            lines.append(f"    @a {target} :| {target}' > {other}")
        else:
            lines.append(f"    @a {target} :∈ {other} - 1 .. {other} + 1")
        lines.append("  end")
    lines.append("end")
    return "\n".join(lines)


@settings(max_examples=60)
@given(random_model_text())
def test_fuzzed_accepted_models_respect_core_invariants(text):
    unit, diags = parse("<fuzz>", text)
    assert diags == [], text
    model, tdiags = resolve_and_typecheck([unit])
    assert model is not None, (text, [str(d) for d in tdiags])
    for m in model.machines:
        seen = set()
        for e in m.events:
            assert e.name not in seen
            seen.add(e.name)
            assert assignment_respects_frame(e.action)
            assert e.action.frame <= m.var_names()
            for g in e.guards:
                assert predicate_is_unprimed(g.body)
            if e.status is not Status.ORDINARY:
                assert m.variant is not None or e.status is Status.ANTICIPATED
        if m.variant is not None:
            assert m.variant.sort is Sort.INT
