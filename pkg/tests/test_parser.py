"""Grammar coverage, syntax diagnostics, and print/reparse round-trips."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebv.parser import (
    PContext,
    PExpr,
    PMachine,
    parse,
    to_source,
)

MINIMAL_MACHINE = """
context ctx
constants n : int
end

machine m0 sees ctx
variables r : int
invariants
  @inv1 r >= 0
events
  event initialisation
  then
    @act1 r := 0
  end
end
"""


def parse_ok(text):
    unit, diags = parse("<test>", text)
    assert diags == [], [str(d) for d in diags]
    return unit.declarations


def first_error(text):
    _, diags = parse("<test>", text)
    assert diags, "expected a syntax error"
    return diags[0]


def test_parse_minimal_machine():
    decls = parse_ok(MINIMAL_MACHINE)
    assert isinstance(decls[0], PContext)
    m = decls[1]
    assert isinstance(m, PMachine)
    assert m.sees == "ctx"
    assert [i.label for i in m.invariants] == ["inv1"]
    assert m.events[0].name == "initialisation"


def test_parse_refining_convergent_event():
    text = """
machine m1 refines m0 sees ctx
variables p : int  q : int  r : int
invariants
  @inv1 p <= q
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
end
"""
    (m,) = parse_ok(text)
    inc = m.events[1]
    assert inc.refines == "progress"
    assert inc.status == "convergent"
    assert len(inc.guards) == 1
    assert inc.guards[0].label == "grd1"
    assert [a.kind for a in inc.actions] == ["assign", "in"]
    assert m.variant == PExpr("sub", (PExpr("name", name="q"), PExpr("name", name="p")))


def test_parse_witness_targets():
    text = """
machine m1 refines m0 sees ctx
variables y : int
invariants
events
  event initialisation then @act1 y := 1 end
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
    (m,) = parse_ok(text)
    with_clause = m.events[1].witnesses
    assert [w.target for w in with_clause] == ["k", "x'"]


def test_parse_empty_guard_list_is_rejected():
    d = first_error("machine m sees c variables invariants events "
                    "event bad where then end end")
    assert d.code == "SYNTAX_ERROR"
    assert "guard" in d.message and "'then'" in d.message


def test_parse_error_carries_expected_tokens():
    d = first_error("machine m sees c variables invariants events "
                    "event e then @a1 x := (1 + end end")
    assert d.code == "SYNTAX_ERROR"
    assert "expected" in d.message


def test_parse_error_position():
    d = first_error("machine m sees c\nvariables x : int\ninvariants\n  @inv1 x >= ?\nevents end")
    assert d.position.line == 4


def test_quantifier_and_operator_precedence():
    text = """
context c
constants f : fun  n : int
axioms
  @a1 forall (x:int, y:int). 1 <= x and x <= y => f(x) <= f(y)
  @a2 exists (x:int). f(x) = 0 or not x = 1
  @a3 1 + 2 * 3 - 4 = 3
  @a4 true <=> 1 < 2
end
"""
    (c,) = parse_ok(text)
    a1 = c.axioms[0].expr
    assert a1.op == "forall"
    assert a1.bound == (("x", "int"), ("y", "int"))
    assert a1.args[0].op == "implies"
    # 1 + 2 * 3 - 4 parses as (1 + (2 * 3)) - 4
    a3 = c.axioms[2].expr
    assert a3.op == "eq"
    assert a3.args[0].op == "sub"
    assert a3.args[0].args[0].op == "add"
    assert a3.args[0].args[0].args[1].op == "mul"


def test_comments_are_skipped():
    decls = parse_ok("// leading note\n" + MINIMAL_MACHINE + "// trailing\n")
    assert len(decls) == 2


def test_duplicate_file_parse_is_deterministic():
    u1, d1 = parse("<t>", MINIMAL_MACHINE)
    u2, d2 = parse("<t>", MINIMAL_MACHINE)
    assert u1.declarations == u2.declarations
    assert d1 == d2


ROUND_TRIP_SOURCES = [
    MINIMAL_MACHINE,
    """
context bs extends base
constants f : fun  v : int
axioms
  @axm1 forall (x:int). (1 <= x and x <= n) => f(x) >= 0
theorems
  @thm1 n > 0
end
""",
    """
machine m1 refines m0 sees ctx
variables p : int  b : bool
invariants
  @inv1 b <=> p > 0
  @inv2 -p <= 3 mod (2 div p)
variant p + -1
events
  event initialisation then @a p, b :| p' = 1 and b' = true end
  event flip status anticipated
  any k : int
  where
    @g1 k /= p
  then
    @a1 b := not b or false
  end
  event keep refines keep
  with
    @w' : w' >= p' and w' <= p'
  then
    @a1 p :∈ p - 1 .. p + 1
  end
end
""",
]


@pytest.mark.parametrize("source", ROUND_TRIP_SOURCES)
def test_print_reparse_round_trip(source):
    unit, diags = parse("<orig>", source)
    assert diags == []
    printed = to_source(unit.declarations)
    unit2, diags2 = parse("<printed>", printed)
    assert diags2 == [], printed
    assert unit2.declarations == unit.declarations, printed


# Randomised round-trip over generated expressions.

_name = st.sampled_from(["a", "b2", "c_d"])


@st.composite
def pexprs(draw, depth=3):
    if depth == 0:
        alt = draw(st.integers(0, 3))
        if alt == 0:
            return PExpr("int", value=draw(st.integers(0, 99)))
        if alt == 1:
            return PExpr("name", name=draw(_name))
        if alt == 2:
            return PExpr("primed", name=draw(_name))
        return PExpr(draw(st.sampled_from(["true", "false"])))
    alt = draw(st.integers(0, 8))
    sub = pexprs(depth=depth - 1)
    if alt == 0:
        return PExpr("apply", (draw(sub),), name="f")
    if alt == 1:
        return PExpr("neg", (draw(sub),))
    if alt == 2:
        return PExpr("not", (draw(sub),))
    if alt == 3:
        op = draw(st.sampled_from(["add", "sub", "mul", "div", "mod"]))
        return PExpr(op, (draw(sub), draw(sub)))
    if alt == 4:
        op = draw(st.sampled_from(["lt", "le", "gt", "ge", "eq", "ne"]))
        return PExpr(op, (draw(sub), draw(sub)))
    if alt == 5:
        return PExpr(draw(st.sampled_from(["and", "or"])),
                     tuple(draw(st.lists(sub, min_size=2, max_size=3))))
    if alt == 6:
        return PExpr("implies", (draw(sub), draw(sub)))
    if alt == 7:
        return PExpr("iff", (draw(sub), draw(sub)))
    return PExpr(draw(st.sampled_from(["forall", "exists"])), (draw(sub),),
                 bound=(("z9", "int"),))


@settings(max_examples=200)
@given(pexprs())
def test_expression_print_reparse(e):
    from ebv.parser import _Parser, expr_to_source, tokenize

    text = expr_to_source(e)
    got = _Parser(tokenize("<gen>", text)).expr()
    assert got == e, text
