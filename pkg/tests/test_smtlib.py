"""Script emission: refutation encoding, mangling, determinism, model parsing."""

from ebv import expr as ex
from ebv.expr import Sort
from ebv.pogen import ExistentialGoal, PlainGoal, sequent
from ebv.smtlib import emit, mangle, parse_model, term


def _thm_po():
    n = ex.const("n")
    return sequent(
        "ctx/thm1/THM", "THM",
        [("ctx/axm1", ex.ge(n, ex.intlit(1)))],
        PlainGoal(ex.gt(n, ex.intlit(0))),
    )


def test_thm_script_asserts_hypothesis_and_negated_goal():
    script = emit(_thm_po())
    assert "(declare-const n Int)" in script.text
    assert "(assert (>= n 1))" in script.text
    assert "(assert (not (> n 0)))" in script.text
    assert script.text.count("(check-sat)") == 1
    assert script.text.index("(check-sat)") < script.text.index("(get-model)")


def test_existential_goal_negates_to_universal():
    po = sequent(
        "m0/progress/FIS", "FIS", [],
        ExistentialGoal((("r'", Sort.INT),), ex.ge(ex.primed("r"), ex.intlit(0))),
    )
    script = emit(po)
    assert "(assert (forall ((|r'| Int)) (not (>= |r'| 0))))" in script.text
    # the existentially bound symbol is not declared globally
    assert "declare-const |r'|" not in script.text


def test_primed_symbols_are_quoted():
    po = sequent(
        "m/e/i/INV", "INV",
        [("action", ex.eq(ex.primed("x"), ex.add(ex.var("x"), ex.intlit(1))))],
        PlainGoal(ex.ge(ex.primed("x"), ex.intlit(0))),
    )
    script = emit(po)
    assert "(declare-const |x'| Int)" in script.text
    assert "(= |x'| (+ x 1))" in script.text
    assert script.symbol_table == {"x": "x", "x'": "|x'|"}


def test_function_symbols_declared_as_functions():
    po = sequent(
        "c/t/THM", "THM", [],
        PlainGoal(ex.ge(ex.apply("f", ex.intlit(1)), ex.intlit(0))),
    )
    assert "(declare-fun f (Int) Int)" in emit(po).text


def test_header_comment_carries_po_id():
    a, b = _thm_po(), _thm_po()
    assert emit(a).text.startswith("; po: ctx/thm1/THM\n(set-logic ALL)")
    other = sequent("ctx/thm2/THM", "THM", list(a.hypotheses), a.goal)
    assert emit(other).text != emit(a).text


def test_emit_is_byte_deterministic():
    assert emit(_thm_po()).text == emit(_thm_po()).text


def test_term_rendering():
    assert term(ex.intlit(-5)) == "(- 5)"
    assert term(ex.neg(ex.var("x"))) == "(- x)"
    assert term(ex.ne(ex.var("a"), ex.var("b"))) == "(distinct a b)"
    assert term(ex.iff(ex.TRUE, ex.FALSE)) == "(= true false)"
    assert term(ex.idiv(ex.var("a"), ex.intlit(2))) == "(div a 2)"
    assert term(ex.imod(ex.var("a"), ex.intlit(2))) == "(mod a 2)"
    assert (
        term(ex.exists([("k", Sort.INT)], ex.eq(ex.var("k"), ex.var("j"))))
        == "(exists ((k Int)) (= k j))"
    )


Z3_STYLE_MODEL = """sat
(
  (define-fun x () Int
    0)
  (define-fun |x'| () Int
    (- 1))
  (define-fun b () Bool
    false)
  (define-fun f ((x!0 Int)) Int
    3)
)
"""


def test_parse_model_ground_values():
    got = parse_model(Z3_STYLE_MODEL)
    assert got == {"x": 0, "x'": -1, "b": False}


def test_parse_model_with_model_keyword_wrapper():
    wrapped = Z3_STYLE_MODEL.replace("sat\n(", "sat\n(model")
    assert parse_model(wrapped) == {"x": 0, "x'": -1, "b": False}


def test_parse_model_ignores_garbage():
    assert parse_model("unsat\n(error \"model is not available\")") == {}
    assert parse_model("") == {}


def test_mangle():
    assert mangle("x'") == "|x'|"
    assert mangle("x") == "x"
