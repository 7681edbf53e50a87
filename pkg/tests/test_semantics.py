import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folx.errors import FreeVariableMismatch, NonClosedFormula, UnboundVariable
from folx.parser import parse_formula, parse_term
from folx.relalg import Tuple
from folx.semantics import (
    denote,
    entails_in,
    enumerate_atom,
    eval_term,
    quotient_atom,
    satisfies,
    sentence_truth,
    term_function,
)
from folx.syntax import And, Atom, Not, Or, Var, free_variables
from folx.universe import MOD_RING_FUNCTIONS, make_mod_ring
from oracles import brute_atom_relation, random_atom, random_formula, random_interpretation, truth_value

POLY = "add(add(mul(x, x), mul(2, mul(y, y))), mul(3, mul(z, z)))"


def ring_term(text):
    return parse_term(text, MOD_RING_FUNCTIONS)


def ring_formula(text, extra=None):
    return parse_formula(text, {**MOD_RING_FUNCTIONS, **(extra or {})})


def test_polynomial_under_two_parameter_orders():
    M = make_mod_ring(61)
    t = ring_term(POLY)
    # oracle: plain integer arithmetic
    assert eval_term(M, {"x": 3, "y": 2, "z": 1}, t) == (9 + 2 * 4 + 3 * 1) % 61 == 20
    assert eval_term(M, {"y": 3, "z": 2, "x": 1}, t) == (1 + 2 * 9 + 3 * 4) % 61 == 31


def test_term_function_graph():
    M = make_mod_ring(3)
    tf = term_function(M, ring_term("add(x, y)"))
    assert tf.params == {"x", "y"}
    assert tf(Tuple({"x": 2, "y": 2})) == 1
    assert len(tf.graph()) == 9


def test_literal_reduced_modulo():
    assert eval_term(make_mod_ring(5), {}, ring_term("add(7, 0)")) == 2


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        satisfies(make_mod_ring(3), {"x": 0}, ring_formula("lt(x, y)"))


def sum_formula():
    return ring_formula("add(x, x) = y")


def test_sum_doubling_relation_mod_5():
    M = make_mod_ring(5)
    r = denote(M, sum_formula())
    assert r.index == ("x", "y")
    expected = {(x, (2 * x) % 5) for x in range(5)}
    assert r.rows == expected == {(0, 0), (1, 2), (2, 4), (3, 1), (4, 3)}


def test_sentences():
    M = make_mod_ring(7)
    assert sentence_truth(M, ring_formula("forall x, y. add(x, y) = add(y, x)"))
    assert not sentence_truth(M, ring_formula("exists x. lt(x, zero)"))
    with pytest.raises(NonClosedFormula):
        sentence_truth(M, ring_formula("lt(x, 1)"))


def test_or_denotation_matches_definition():
    M = make_mod_ring(5)
    A, B = ring_formula("lt(x, 2)"), ring_formula("x = 4")
    via_or = denote(M, Or((A, B)))
    via_not = denote(M, Not(And((Not(A), Not(B)))))
    assert via_or == via_not
    assert via_or.rows == {(0,), (1,), (4,)}


def test_entails():
    M = make_mod_ring(5)
    s = sum_formula()
    assert entails_in(M, s, Or((s, ring_formula("lt(x, y)"))))
    assert not entails_in(M, ring_formula("lt(x, y)"), s)
    with pytest.raises(FreeVariableMismatch):
        entails_in(M, ring_formula("lt(x, 1)"), ring_formula("lt(y, 1)"))


def test_vacuous_quantifier():
    M = make_mod_ring(3)
    F = ring_formula("exists z. lt(x, 1)")
    assert denote(M, F).index == ("x",)
    assert denote(M, F).rows == {(0,)}


def test_true_and_false():
    M = make_mod_ring(2)
    assert sentence_truth(M, ring_formula("true"))
    assert not sentence_truth(M, ring_formula("false"))


def check_agreement(M, F):
    r = denote(M, F)
    V = sorted(free_variables(F))
    assert r.index == tuple(V)
    for combo in itertools.product(M.universe.elements, repeat=len(V)):
        A = dict(zip(V, combo))
        expected = truth_value(M, A, F)
        assert satisfies(M, A, F) == expected
        assert (combo in r.rows) == expected


@given(st.integers(0, 10**6), st.integers(2, 3))
def test_denotation_agrees_with_satisfaction(seed, size):
    rng = random.Random(seed)
    check_agreement(random_interpretation(rng, size), random_formula(rng))


@settings(max_examples=100)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_quotient_equals_enumeration(seed, size):
    rng = random.Random(seed)
    M = random_interpretation(rng, size)
    F = random_atom(rng, term_depth=0)
    args = F.args if isinstance(F, Atom) else (F.left, F.right)
    if all(isinstance(a, Var) for a in args):
        q = quotient_atom(M, F)
        assert q == enumerate_atom(M, F)
        if isinstance(F, Atom):
            assert set(q.tuples) == brute_atom_relation(M, F.symbol, F.args)
