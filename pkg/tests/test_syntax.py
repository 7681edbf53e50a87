import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from folx.errors import (
    ArityMismatch,
    DuplicateSymbol,
    NonHornClause,
    ParameterMismatch,
    RecursiveFunction,
    RecursiveRelationOutsideHornBlock,
    UnknownSymbol,
    VariableCapture,
)
from folx.syntax import (
    FALSE,
    TRUE,
    And,
    App,
    Atom,
    Clause,
    Eq,
    Exists,
    Forall,
    FuncDef,
    HornBlock,
    Implies,
    Lit,
    Not,
    Or,
    RelDef,
    TheoryDecl,
    Var,
    defined_symbols,
    desugar,
    free_variables,
    subformulas,
    term_variables,
    used_symbols,
    validate_definition,
)
from oracles import random_formula

ED = TheoryDecl(
    "ED",
    {"zero": 0, "unit": 0, "add": 2, "sub": 2, "mul": 2},
    {"lt": 2},
)
x, y, z = Var("x"), Var("y"), Var("z")


def add(a, b):
    return App("add", (a, b))


def sub(a, b):
    return App("sub", (a, b))


def test_term_variables():
    assert term_variables(add(x, App("mul", (Lit(2), y)))) == {"x", "y"}
    assert term_variables(App("zero")) == frozenset()


def test_free_variables_examples():
    assert free_variables(Exists("y", Atom("lt", (x, y)))) == {"x"}
    assert free_variables(Forall("x", Eq(x, x))) == frozenset()
    assert free_variables(Implies(Atom("lt", (x, y)), Eq(z, z))) == {"x", "y", "z"}
    assert free_variables(TRUE) == free_variables(FALSE) == frozenset()


def test_desugar_core_only():
    F = Forall("x", Implies(Atom("lt", (x, y)), Or((Eq(x, y), Atom("lt", (y, x))))))
    core = desugar(F)
    assert all(isinstance(G, (Atom, Eq, And, Not, Exists)) for G in subformulas(core))


def test_desugar_reverse_implication_shape():
    # A <- B is A | !B, which desugars to !(!A & B)
    A, B = Atom("lt", (x, y)), Eq(x, y)
    assert desugar(Or((A, Not(B)))) == Not(And((Not(A), B)))


def test_desugar_constants():
    assert desugar(FALSE) == Not(And(()))
    assert desugar(TRUE) == TRUE


@given(st.integers(0, 10**6))
def test_desugar_preserves_free_variables_and_is_idempotent(seed):
    F = random_formula(random.Random(seed))
    D = desugar(F)
    assert free_variables(D) == free_variables(F)
    assert desugar(D) == D


# ------------------------------------------------------------- definitions


def test_function_definition_accepted():
    d = FuncDef("double", ("x",), add(x, x))
    assert validate_definition(d, ED) is d
    assert defined_symbols(d) == ("double",)
    assert used_symbols(d) == {"add"}


def test_function_definition_errors():
    with pytest.raises(DuplicateSymbol):
        validate_definition(FuncDef("add", ("x",), x), ED)
    with pytest.raises(ParameterMismatch):
        validate_definition(FuncDef("h", ("x", "y"), add(x, x)), ED)
    with pytest.raises(ParameterMismatch):
        validate_definition(FuncDef("h", ("x", "x"), add(x, x)), ED)
    with pytest.raises(RecursiveFunction):
        validate_definition(FuncDef("h", ("x",), App("h", (x,))), ED)
    with pytest.raises(UnknownSymbol):
        validate_definition(FuncDef("h", ("x",), App("nope", (x,))), ED)
    with pytest.raises(ArityMismatch):
        validate_definition(FuncDef("h", ("x",), App("add", (x,))), ED)


def test_relation_definition_accepted():
    d = RelDef("sum", ("x", "y", "z"), Eq(add(x, y), z))
    validate_definition(d, ED)
    d2 = RelDef("nonneg", ("x",), Exists("y", Atom("lt", (y, x))))
    validate_definition(d2, ED)


def test_relation_definition_errors():
    with pytest.raises(DuplicateSymbol):
        validate_definition(RelDef("r", ("x",), Atom("r", (x,))), ED.with_relation("r", 1))
    with pytest.raises(RecursiveRelationOutsideHornBlock):
        validate_definition(RelDef("r", ("x",), Atom("r", (x,))), ED)
    with pytest.raises(ParameterMismatch):
        validate_definition(RelDef("r", ("x",), Atom("lt", (x, y))), ED)
    with pytest.raises(VariableCapture):
        validate_definition(RelDef("r", ("x",), And((Eq(x, x), Exists("x", Eq(x, x))))), ED)
    with pytest.raises(VariableCapture):
        validate_definition(RelDef("r", ("x",), Exists("y", And((Eq(x, y), Exists("y", Eq(y, y)))))), ED)
    with pytest.raises(ArityMismatch):
        validate_definition(RelDef("r", ("x",), Atom("add", (x, x))), ED)


GCD = HornBlock(
    (("gcd", 3),),
    (
        Clause(Atom("gcd", (x, y, z)), (Atom("lt", (x, y)), Atom("gcd", (x, sub(y, x), z)))),
        Clause(Atom("gcd", (x, y, z)), (Atom("lt", (y, x)), Atom("gcd", (sub(x, y), y, z)))),
        Clause(Atom("gcd", (x, y, z)), (Eq(y, x), Eq(z, x))),
    ),
)


def test_gcd_block_accepted():
    validate_definition(GCD, ED)
    assert GCD.name == "gcd"
    assert GCD.arities == {"gcd": 3}
    assert used_symbols(GCD) == {"lt", "sub"}


def test_clause_local_variables():
    c = Clause(Atom("h", (x,)), (Atom("lt", (x, y)),))
    assert c.head_vars == ("x",)
    assert c.local_vars == {"y"}


def block(*clauses):
    return HornBlock((("h", 1),), clauses)


def test_horn_rejections():
    with pytest.raises(NonHornClause):
        validate_definition(block(Clause(Atom("h", (App("zero"),)), ())), ED)
    with pytest.raises(NonHornClause):
        validate_definition(block(Clause(Atom("h", (x,)), (Not(Atom("h", (x,))),))), ED)
    with pytest.raises(NonHornClause):
        validate_definition(block(Clause(Atom("h", (x,)), (Exists("y", Atom("lt", (x, y))),))), ED)
    with pytest.raises(ArityMismatch):
        validate_definition(block(Clause(Atom("h", (x, y)), ())), ED)
    with pytest.raises(UnknownSymbol):
        validate_definition(block(Clause(Atom("k", (x,)), ())), ED)
    with pytest.raises(DuplicateSymbol):
        validate_definition(HornBlock((("lt", 2),), ()), ED)


def test_repeated_head_variable_rejected():
    b = HornBlock((("h", 2),), (Clause(Atom("h", (x, x)), ()),))
    with pytest.raises(NonHornClause):
        validate_definition(b, ED)


def test_theory_extension():
    T = ED.with_function("double", 1).with_relation("sum", 3)
    assert T.has("double") and T.has("sum") and not ED.has("sum")
    assert T.constants == {"zero", "unit"}
    with pytest.raises(DuplicateSymbol):
        T.with_relation("double", 1)
    with pytest.raises(DuplicateSymbol):
        TheoryDecl("bad", {"a": 0}, {"a": 1})
