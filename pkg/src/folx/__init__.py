"""Compositional first-order logic over finite interpretations.

Formulas denote relations indexed by their free variables; interpretations
can be extended with defined functions, defined relations, and recursive
Horn-clause relations solved as least fixpoints.
"""

from .extend import (
    ExtensionState,
    HornSystem,
    apply_program,
    extend_function,
    extend_relation,
    fixpoint_trace,
    immediate_consequence,
    solve_horn,
)
from .parser import parse_formula, parse_program, parse_term, render
from .relalg import Relation, Tuple, Universe
from .semantics import denote, entails_in, eval_term, satisfies, sentence_truth, term_function
from .universe import Interpretation, check_satisfies, make_enum_universe, make_mod_ring

__version__ = "0.1.0"

__all__ = [
    "ExtensionState",
    "HornSystem",
    "Interpretation",
    "Relation",
    "Tuple",
    "Universe",
    "apply_program",
    "check_satisfies",
    "denote",
    "entails_in",
    "eval_term",
    "extend_function",
    "extend_relation",
    "fixpoint_trace",
    "immediate_consequence",
    "make_enum_universe",
    "make_mod_ring",
    "parse_formula",
    "parse_program",
    "parse_term",
    "render",
    "satisfies",
    "sentence_truth",
    "solve_horn",
    "term_function",
]
