"""Satisfaction and compositional denotation of formulas.

:func:`satisfies` decides truth under one assignment, clause by clause.
:func:`denote` maps a formula to the relation of all assignments to its free
variables that make it true, built only from relational algebra:

* an atom whose arguments are all variables is the quotient of the symbol's
  relation by the argument tuple;
* any other atom is enumerated over all assignments to its variables;
* conjunction is join, ``exists`` is projection, negation is complement.

The two must agree everywhere; the test suite holds them to that.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping

from .errors import FreeVariableMismatch, NonClosedFormula, UnboundVariable
from .relalg import (
    Relation,
    Tuple,
    complement,
    join,
    project,
    relation_quotient,
    truth,
)
from .syntax import (
    EQ_SYMBOL,
    And,
    Atom,
    Eq,
    Exists,
    Formula,
    Lit,
    Not,
    Term,
    Var,
    desugar,
    free_variables,
    term_variables,
)

if TYPE_CHECKING:
    from .universe import Interpretation

Assignment = Mapping[str, int]


def _as_dict(A: Tuple | Assignment) -> dict:
    return A.as_dict() if isinstance(A, Tuple) else dict(A)


def _eval(M: "Interpretation", A: dict, t: Term) -> int:
    if isinstance(t, Var):
        try:
            return A[t.name]
        except KeyError:
            raise UnboundVariable(f"variable {t.name!r} is unbound") from None
    if isinstance(t, Lit):
        return M.literal(t.value)
    f = M.function(t.symbol)
    return f(*[_eval(M, A, a) for a in t.args])


def eval_term(M: "Interpretation", A: Tuple | Assignment, t: Term) -> int:
    """Value of ``t`` under assignment ``A``."""
    return _eval(M, _as_dict(A), t)


@dataclass(frozen=True)
class TermFunction:
    """The denotation of a term: a function from assignments over its variables."""

    interpretation: "Interpretation"
    term: Term

    @property
    def params(self) -> frozenset[str]:
        return term_variables(self.term)

    def __call__(self, A: Tuple | Assignment) -> int:
        d = _as_dict(A)
        return _eval(self.interpretation, {v: d[v] for v in self.params if v in d}, self.term)

    def graph(self) -> dict[Tuple, int]:
        """Materialize the function over every assignment to its parameters."""
        names = sorted(self.params)
        out = {}
        for combo in itertools.product(self.interpretation.universe.elements, repeat=len(names)):
            A = dict(zip(names, combo))
            out[Tuple(A)] = _eval(self.interpretation, A, self.term)
        return out


def term_function(M: "Interpretation", t: Term) -> TermFunction:
    return TermFunction(M, t)


# --------------------------------------------------------------- satisfaction


def _sat(M: "Interpretation", A: dict, F: Formula) -> bool:
    if isinstance(F, Atom):
        vals = tuple(_eval(M, A, a) for a in F.args)
        return vals in M.relation(F.symbol).rows
    if isinstance(F, Eq):
        return _eval(M, A, F.left) == _eval(M, A, F.right)
    if isinstance(F, And):
        return all(_sat(M, A, p) for p in F.parts)
    if isinstance(F, Not):
        return not _sat(M, A, F.body)
    if isinstance(F, Exists):
        saved = A.get(F.var, _MISSING)
        try:
            for d in M.universe.elements:
                A[F.var] = d
                if _sat(M, A, F.body):
                    return True
            return False
        finally:
            if saved is _MISSING:
                del A[F.var]
            else:
                A[F.var] = saved
    raise TypeError(f"formula not desugared: {F!r}")


_MISSING = object()


def satisfies(M: "Interpretation", A: Tuple | Assignment, F: Formula) -> bool:
    """Whether ``M`` with assignment ``A`` satisfies ``F``."""
    A = _as_dict(A)
    missing = free_variables(F) - A.keys()
    if missing:
        raise UnboundVariable(f"variables {sorted(missing)} are unbound")
    return _sat(M, A, desugar(F))


# -------------------------------------------------------------- denotation


def _all_vars(args: tuple[Term, ...]) -> bool:
    return all(isinstance(a, Var) for a in args)


def enumerate_atom(M: "Interpretation", F: Atom | Eq) -> Relation:
    """``{A in V -> D | (M_A(t_0), ...) in M(p)}`` by brute force over ``V -> D``."""
    if isinstance(F, Eq):
        symbol, args = EQ_SYMBOL, (F.left, F.right)
    else:
        symbol, args = F.symbol, F.args
    rel = M.relation(symbol).rows
    V = sorted(free_variables(F))
    rows = set()
    for combo in itertools.product(M.universe.elements, repeat=len(V)):
        A = dict(zip(V, combo))
        if tuple(_eval(M, A, a) for a in args) in rel:
            rows.add(combo)
    return Relation._trusted(tuple(V), M.universe, frozenset(rows))


def quotient_atom(M: "Interpretation", F: Atom | Eq) -> Relation:
    """An all-variable atom as the quotient of its relation by its argument tuple."""
    if isinstance(F, Eq):
        symbol, args = EQ_SYMBOL, (F.left, F.right)
    else:
        symbol, args = F.symbol, F.args
    return relation_quotient(M.relation(symbol), Tuple.positional([a.name for a in args]))


def denote(M: "Interpretation", F: Formula) -> Relation:
    """The relation ``M(F)`` over the free variables of ``F``."""
    memo: dict[Formula, Relation] = {}
    U = M.universe

    def go(G: Formula) -> Relation:
        hit = memo.get(G)
        if hit is not None:
            return hit
        if isinstance(G, Atom):
            r = quotient_atom(M, G) if _all_vars(G.args) else enumerate_atom(M, G)
        elif isinstance(G, Eq):
            r = quotient_atom(M, G) if _all_vars((G.left, G.right)) else enumerate_atom(M, G)
        elif isinstance(G, And):
            r = truth(U)
            for p in G.parts:
                r = join(r, go(p))
        elif isinstance(G, Not):
            r = complement(go(G.body))
        elif isinstance(G, Exists):
            inner = go(G.body)
            r = project(inner, [i for i in inner.index if i != G.var])
        else:
            raise TypeError(f"formula not desugared: {G!r}")
        memo[G] = r
        return r

    return go(desugar(F))


def sentence_truth(M: "Interpretation", F: Formula) -> bool:
    fv = free_variables(F)
    if fv:
        raise NonClosedFormula(f"formula has free variables {sorted(fv)}")
    return bool(denote(M, F).rows)


def entails_in(M: "Interpretation", F0: Formula, F1: Formula) -> bool:
    """``M(F0) ⊆ M(F1)`` in the single interpretation ``M``."""
    if free_variables(F0) != free_variables(F1):
        raise FreeVariableMismatch(
            f"free variables differ: {sorted(free_variables(F0))} vs {sorted(free_variables(F1))}"
        )
    return denote(M, F0).rows <= denote(M, F1).rows
