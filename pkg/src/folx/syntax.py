"""Abstract syntax for terms, formulas, theories and definitions.

Terms are variables, integer literals, or applications of function symbols
(constants are 0-ary applications).  Formulas use the core connectives
``Atom``, ``Eq``, ``And``, ``Not`` and ``Exists``; ``Or``, ``Implies`` and
``Forall`` are surface sugar removed by :func:`desugar`.

All nodes are frozen dataclasses, so structurally equal formulas compare and
hash equal.  Source positions ride along on statements with ``compare=False``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

from .errors import (
    ArityMismatch,
    DuplicateSymbol,
    NonHornClause,
    ParameterMismatch,
    RecursiveFunction,
    RecursiveRelationOutsideHornBlock,
    UnknownSymbol,
    VariableCapture,
)

Span = Union[tuple[int, int], None]

EQ_SYMBOL = "="


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Lit:
    """Integer literal; the interpretation's universe maps it to an element."""

    value: int

    def __repr__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple["Term", ...] = ()

    def __repr__(self) -> str:
        if not self.args:
            return self.symbol
        return f"{self.symbol}({', '.join(map(repr, self.args))})"


Term = Union[Var, Lit, App]


def const(name: str) -> App:
    return App(name, ())


def term_variables(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset({t.name})
    if isinstance(t, Lit):
        return frozenset()
    out: set[str] = set()
    for a in t.args:
        out |= term_variables(a)
    return frozenset(out)


def term_symbols(t: Term) -> Iterator[tuple[str, int]]:
    if isinstance(t, App):
        yield t.symbol, len(t.args)
        for a in t.args:
            yield from term_symbols(a)


# ------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Atom:
    symbol: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...] = ()


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Or:
    parts: tuple["Formula", ...] = ()


@dataclass(frozen=True)
class Implies:
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Atom, Eq, And, Not, Exists, Or, Implies, Forall]

TRUE = And(())
FALSE = Or(())


def conj(*parts: Formula) -> And:
    return And(tuple(parts))


def disj(*parts: Formula) -> Or:
    return Or(tuple(parts))


def exists(names: Iterable[str], body: Formula) -> Formula:
    for n in reversed(list(names)):
        body = Exists(n, body)
    return body


def forall(names: Iterable[str], body: Formula) -> Formula:
    for n in reversed(list(names)):
        body = Forall(n, body)
    return body


def free_variables(F: Formula) -> frozenset[str]:
    if isinstance(F, Atom):
        out: set[str] = set()
        for a in F.args:
            out |= term_variables(a)
        return frozenset(out)
    if isinstance(F, Eq):
        return term_variables(F.left) | term_variables(F.right)
    if isinstance(F, (And, Or)):
        out = set()
        for p in F.parts:
            out |= free_variables(p)
        return frozenset(out)
    if isinstance(F, Not):
        return free_variables(F.body)
    if isinstance(F, (Exists, Forall)):
        return free_variables(F.body) - {F.var}
    if isinstance(F, Implies):
        return free_variables(F.antecedent) | free_variables(F.consequent)
    raise TypeError(f"not a formula: {F!r}")


def _negate(F: Formula) -> Formula:
    # keeps A <- B, read as A | !B, at the shape !(!A & B)
    return F.body if isinstance(F, Not) else Not(F)


def desugar(F: Formula) -> Formula:
    """Rewrite to Atom/Eq/And/Not/Exists only."""
    if isinstance(F, (Atom, Eq)):
        return F
    if isinstance(F, And):
        return And(tuple(desugar(p) for p in F.parts))
    if isinstance(F, Not):
        return Not(desugar(F.body))
    if isinstance(F, Exists):
        return Exists(F.var, desugar(F.body))
    if isinstance(F, Or):
        return Not(And(tuple(_negate(desugar(p)) for p in F.parts)))
    if isinstance(F, Implies):
        return desugar(Or((Not(F.antecedent), F.consequent)))
    if isinstance(F, Forall):
        return Not(Exists(F.var, Not(desugar(F.body))))
    raise TypeError(f"not a formula: {F!r}")


def subformulas(F: Formula) -> Iterator[Formula]:
    yield F
    if isinstance(F, (And, Or)):
        for p in F.parts:
            yield from subformulas(p)
    elif isinstance(F, (Not, Exists, Forall)):
        yield from subformulas(F.body)
    elif isinstance(F, Implies):
        yield from subformulas(F.antecedent)
        yield from subformulas(F.consequent)


def formula_terms(F: Formula) -> Iterator[Term]:
    for sub in subformulas(F):
        if isinstance(sub, Atom):
            yield from sub.args
        elif isinstance(sub, Eq):
            yield sub.left
            yield sub.right


def formula_function_symbols(F: Formula) -> Iterator[tuple[str, int]]:
    for t in formula_terms(F):
        yield from term_symbols(t)


def formula_relation_symbols(F: Formula) -> Iterator[tuple[str, int]]:
    for sub in subformulas(F):
        if isinstance(sub, Atom):
            yield sub.symbol, len(sub.args)


# ------------------------------------------------------ theories, definitions


@dataclass(frozen=True)
class TheoryDecl:
    """A signature: symbol name to arity, constants being 0-ary functions."""

    name: str
    functions: Mapping[str, int] = field(default_factory=dict)
    relations: Mapping[str, int] = field(default_factory=dict)
    span: Span = field(default=None, compare=False)

    def __post_init__(self):
        clash = set(self.functions) & set(self.relations)
        if clash:
            raise DuplicateSymbol(f"symbol {sorted(clash)[0]!r} declared as both function and relation", self.span)

    def __hash__(self) -> int:
        return hash((self.name, tuple(sorted(self.functions.items())), tuple(sorted(self.relations.items()))))

    @property
    def constants(self) -> frozenset[str]:
        return frozenset(f for f, n in self.functions.items() if n == 0)

    def has(self, symbol: str) -> bool:
        return symbol in self.functions or symbol in self.relations

    def with_function(self, name: str, arity: int) -> "TheoryDecl":
        if self.has(name):
            raise DuplicateSymbol(f"symbol {name!r} already in theory {self.name}")
        return TheoryDecl(self.name, {**self.functions, name: arity}, dict(self.relations))

    def with_relation(self, name: str, arity: int) -> "TheoryDecl":
        if self.has(name):
            raise DuplicateSymbol(f"symbol {name!r} already in theory {self.name}")
        return TheoryDecl(self.name, dict(self.functions), {**self.relations, name: arity})


@dataclass(frozen=True)
class FuncDef:
    symbol: str
    params: tuple[str, ...]
    body: Term
    span: Span = field(default=None, compare=False)


@dataclass(frozen=True)
class RelDef:
    symbol: str
    params: tuple[str, ...]
    body: Formula
    span: Span = field(default=None, compare=False)


@dataclass(frozen=True)
class Clause:
    """``head <- body``; body literals are implicitly conjoined."""

    head: Atom
    body: tuple[Formula, ...] = ()
    span: Span = field(default=None, compare=False)

    @property
    def head_vars(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.head.args if isinstance(a, Var))

    @property
    def local_vars(self) -> frozenset[str]:
        body_vars: set[str] = set()
        for lit in self.body:
            body_vars |= free_variables(lit)
        return frozenset(body_vars) - set(self.head_vars)


@dataclass(frozen=True)
class HornBlock:
    symbols: tuple[tuple[str, int], ...]
    clauses: tuple[Clause, ...]
    span: Span = field(default=None, compare=False)

    @property
    def name(self) -> str:
        return self.symbols[0][0] if self.symbols else "<empty>"

    @property
    def arities(self) -> dict[str, int]:
        return dict(self.symbols)


Definition = Union[FuncDef, RelDef, HornBlock]


def defined_symbols(d: Definition) -> tuple[str, ...]:
    if isinstance(d, HornBlock):
        return tuple(s for s, _ in d.symbols)
    return (d.symbol,)


def used_symbols(d: Definition) -> set[str]:
    if isinstance(d, FuncDef):
        return {s for s, _ in term_symbols(d.body)}
    if isinstance(d, RelDef):
        return {s for s, _ in formula_function_symbols(d.body)} | {
            s for s, _ in formula_relation_symbols(d.body)
        }
    out: set[str] = set()
    for c in d.clauses:
        for lit in c.body:
            out |= {s for s, _ in formula_function_symbols(lit)}
            out |= {s for s, _ in formula_relation_symbols(lit)}
    return out - set(defined_symbols(d))


# ------------------------------------------------------------- validation


def _check_params(params: tuple[str, ...], span: Span) -> None:
    if len(set(params)) != len(params):
        raise ParameterMismatch(f"parameters {params!r} are not pairwise distinct", span)


def check_term(t: Term, theory: TheoryDecl, span: Span) -> None:
    for sym, n in term_symbols(t):
        if sym not in theory.functions:
            if sym in theory.relations:
                raise ArityMismatch(f"{sym!r} is a relation symbol, used as a function", span)
            raise UnknownSymbol(f"unknown function symbol {sym!r}", span)
        if theory.functions[sym] != n:
            raise ArityMismatch(f"{sym!r} expects {theory.functions[sym]} arguments, got {n}", span)


def check_formula(F: Formula, theory: TheoryDecl, span: Span = None, extra_relations: Mapping[str, int] | None = None) -> None:
    """Symbol/arity checks for a formula against a signature."""
    rels = dict(theory.relations)
    if extra_relations:
        rels.update(extra_relations)
    for t in formula_terms(F):
        check_term(t, theory, span)
    for sym, n in formula_relation_symbols(F):
        if sym not in rels:
            if sym in theory.functions:
                raise ArityMismatch(f"{sym!r} is a function symbol, used as a relation", span)
            raise UnknownSymbol(f"unknown relation symbol {sym!r}", span)
        if rels[sym] != n:
            raise ArityMismatch(f"{sym!r} expects {rels[sym]} arguments, got {n}", span)


def check_alpha_clean(F: Formula, span: Span = None) -> None:
    """Reject quantifiers that rebind a variable free in the body or already bound."""
    free = free_variables(F)

    def walk(G: Formula, bound: frozenset[str]) -> None:
        if isinstance(G, (Exists, Forall)):
            if G.var in free or G.var in bound:
                raise VariableCapture(f"quantifier rebinds variable {G.var!r}", span)
            walk(G.body, bound | {G.var})
        elif isinstance(G, (And, Or)):
            for p in G.parts:
                walk(p, bound)
        elif isinstance(G, Not):
            walk(G.body, bound)
        elif isinstance(G, Implies):
            walk(G.antecedent, bound)
            walk(G.consequent, bound)

    walk(F, frozenset())


def validate_definition(d: Definition, theory: TheoryDecl) -> Definition:
    """Check a definition against the theory it extends; return it unchanged."""
    span = d.span
    for s in defined_symbols(d):
        if theory.has(s) or s == EQ_SYMBOL:
            raise DuplicateSymbol(f"symbol {s!r} is already defined", span)
    if isinstance(d, FuncDef):
        _check_params(d.params, span)
        if d.symbol in {s for s, _ in term_symbols(d.body)}:
            raise RecursiveFunction(f"function {d.symbol!r} occurs in its own definition", span)
        if set(d.params) != term_variables(d.body):
            raise ParameterMismatch(
                f"parameters {sorted(d.params)} differ from body variables {sorted(term_variables(d.body))}", span
            )
        check_term(d.body, theory, span)
    elif isinstance(d, RelDef):
        _check_params(d.params, span)
        if d.symbol in {s for s, _ in formula_relation_symbols(d.body)}:
            raise RecursiveRelationOutsideHornBlock(
                f"relation {d.symbol!r} occurs in its own definition; use a rec block", span
            )
        if d.symbol in {s for s, _ in formula_function_symbols(d.body)}:
            raise RecursiveFunction(f"symbol {d.symbol!r} occurs in its own definition", span)
        fv = free_variables(d.body)
        if set(d.params) != fv:
            raise ParameterMismatch(f"parameters {sorted(d.params)} differ from free variables {sorted(fv)}", span)
        check_alpha_clean(d.body, span)
        check_formula(d.body, theory, span)
    elif isinstance(d, HornBlock):
        _validate_horn(d, theory)
    else:
        raise TypeError(f"not a definition: {d!r}")
    return d


def _validate_horn(block: HornBlock, theory: TheoryDecl) -> None:
    arities = block.arities
    if len(arities) != len(block.symbols):
        raise DuplicateSymbol("symbol declared twice in one rec block", block.span)
    for c in block.clauses:
        span = c.span or block.span
        h = c.head
        if h.symbol not in arities:
            raise UnknownSymbol(f"clause head {h.symbol!r} is not declared by this rec block", span)
        if len(h.args) != arities[h.symbol]:
            raise ArityMismatch(f"{h.symbol!r} expects {arities[h.symbol]} arguments, got {len(h.args)}", span)
        if not all(isinstance(a, Var) for a in h.args):
            raise NonHornClause("clause head arguments must be variables", span)
        if len(set(c.head_vars)) != len(c.head_vars):
            raise NonHornClause("clause head variables must be pairwise distinct", span)
        for lit in c.body:
            if not isinstance(lit, (Atom, Eq)):
                raise NonHornClause(f"clause body literal {lit!r} is not a positive atom", span)
            check_formula(lit, theory, span, extra_relations=arities)
