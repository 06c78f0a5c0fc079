"""Ground evaluation of expressions and brute-force sequent checking.

This is the solver-independent route: it interprets expression trees
directly over concrete integer/boolean environments, with the same
Euclidean division and modulo semantics the SMT backend relies on.  Used
to confirm counterexamples reported by the solver and, over small finite
domains, as an enumeration oracle that must agree with it.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping

from . import expr as ex
from .expr import Expr, Sort, sym_key, walk
from .pogen import PlainGoal, ProofObligation

Value = int | bool
Env = Mapping[str, Value]


class EvalError(Exception):
    """Expression is not ground/function-free, or the environment is short."""


def euclidean_div(a: int, b: int) -> int:
    if b == 0:
        raise EvalError("division by zero")
    return a // b if b > 0 else -(a // -b)


def euclidean_mod(a: int, b: int) -> int:
    return a - b * euclidean_div(a, b)


_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": euclidean_div,
    "mod": euclidean_mod,
}
_CMP = {
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "gt": lambda a, b: a > b,
    "ge": lambda a, b: a >= b,
}


def evaluate(e: Expr, env: Env) -> Value:
    """Value of a function-free, quantifier-free expression under ``env``.

    Environment keys follow counterexample naming: plain symbol names,
    primed ones with a trailing apostrophe (``"x'"``).
    """
    k = e.kind
    if k in ("int", "bool"):
        return e.value
    if k in ex.REF_KINDS:
        key = sym_key(e.name, k)
        if key not in env:
            raise EvalError(f"no value for symbol {key}")
        return env[key]
    if k == "apply":
        raise EvalError(f"uninterpreted function {e.name} cannot be evaluated")
    if k in ex.QUANT_KINDS:
        raise EvalError("quantified expression is not ground")
    if k == "neg":
        return -evaluate(e.args[0], env)
    if k in _ARITH:
        return _ARITH[k](evaluate(e.args[0], env), evaluate(e.args[1], env))
    if k in _CMP:
        return _CMP[k](evaluate(e.args[0], env), evaluate(e.args[1], env))
    if k == "eq":
        return evaluate(e.args[0], env) == evaluate(e.args[1], env)
    if k == "ne":
        return evaluate(e.args[0], env) != evaluate(e.args[1], env)
    if k == "not":
        return not evaluate(e.args[0], env)
    if k == "and":
        return all(evaluate(a, env) for a in e.args)
    if k == "or":
        return any(evaluate(a, env) for a in e.args)
    if k == "implies":
        return (not evaluate(e.args[0], env)) or evaluate(e.args[1], env)
    if k == "iff":
        return evaluate(e.args[0], env) == evaluate(e.args[1], env)
    raise AssertionError(f"unhandled node kind {k!r}")


def _exprs_of(po: ProofObligation) -> list[Expr]:
    return [h for _, h in po.hypotheses] + [po.goal.body]


def is_ground_function_free(po: ProofObligation) -> bool:
    """Plain-goal obligation with no functions or quantifiers anywhere."""
    if not isinstance(po.goal, PlainGoal):
        return False
    for e in _exprs_of(po):
        for node in walk(e):
            if node.kind == "apply" or node.kind in ex.QUANT_KINDS:
                return False
    return True


def check_counterexample(po: ProofObligation, env: Env) -> bool | None:
    """Is ``env`` a genuine refutation: all hypotheses true, goal false?

    Returns ``None`` when the obligation is outside the ground
    function-free fragment this evaluator covers.
    """
    if not is_ground_function_free(po):
        return None
    try:
        hyps_ok = all(evaluate(h, env) for _, h in po.hypotheses)
        goal_val = evaluate(po.goal.body, env)
    except EvalError:
        return None
    return hyps_ok and not goal_val


def brute_force_valid(po: ProofObligation, int_domain: Iterable[int]) -> bool:
    """Enumeration verdict over a finite domain.

    Every integer symbol ranges over ``int_domain``, every boolean symbol
    over both truth values; the sequent is valid when no assignment makes
    all hypotheses true and the goal false.  Only meaningful when the
    hypotheses confine every symbol to the domain.
    """
    if not is_ground_function_free(po):
        raise EvalError("brute force needs a ground, function-free obligation")
    dom = list(int_domain)
    keys = [sym_key(s.name, s.kind) for s in po.symbols]
    spaces = [
        [False, True] if s.sort is Sort.BOOL else dom for s in po.symbols
    ]
    for values in itertools.product(*spaces):
        env = dict(zip(keys, values))
        if all(evaluate(h, env) for _, h in po.hypotheses) and not evaluate(
            po.goal.body, env
        ):
            return False
    return True
