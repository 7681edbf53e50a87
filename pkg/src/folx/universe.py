"""Finite universes of discourse and built-in interpretations.

The built-in ``mod(m)`` interpretation is the modular Euclidean domain: the
residues ``0..m-1`` with ``zero``, ``unit``, ``add``, ``sub``, ``mul`` and the
relations ``lt`` (order on representatives) and ``eq`` (the diagonal).
``enum`` interpretations take explicit tables and exist mostly for tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    ArityMismatch,
    InvalidModulus,
    LiteralOutOfRange,
    NonClosedAxiom,
    PartialFunctionTable,
    UninterpretedSymbol,
    UnknownSymbol,
)
from .relalg import Relation, Tuple, Universe, complement
from .syntax import EQ_SYMBOL, Formula, Forall, TheoryDecl, free_variables

MOD_RING_FUNCTIONS = {"zero": 0, "unit": 0, "add": 2, "sub": 2, "mul": 2}
MOD_RING_RELATIONS = {"lt": 2, "eq": 2}


@dataclass(frozen=True)
class Function:
    """A total function ``D^arity -> D`` over element ids."""

    arity: int
    fn: Callable[..., int] = field(compare=False)
    table: Mapping[tuple[int, ...], int] | None = field(default=None, compare=False)

    def __call__(self, *args: int) -> int:
        return self.fn(*args)

    @classmethod
    def from_table(cls, arity: int, table: Mapping[tuple[int, ...], int]) -> "Function":
        t = dict(table)
        return cls(arity, lambda *a: t[a], t)


class RelationTable(Mapping):
    """Symbol to relation, where an entry may be built on first access.

    Built-in order relations over large moduli are quadratic in size, so they
    are only materialised when a program actually uses them.
    """

    def __init__(self, entries: Mapping[str, Relation] | None = None, lazy: Mapping[str, tuple[int, Callable[[], Relation]]] | None = None):
        self._arity: dict[str, int] = {}
        self._built: dict[str, Relation] = {}
        self._make: dict[str, Callable[[], Relation]] = {}
        for name, (n, make) in (lazy or {}).items():
            self._arity[name] = n
            self._make[name] = make
        for name, r in (entries or {}).items():
            self._set(name, r)

    def _set(self, name: str, r: Relation) -> None:
        self._arity[name] = len(r.index)
        self._built[name] = r
        self._make.pop(name, None)

    def __getitem__(self, name: str) -> Relation:
        if name not in self._built:
            make = self._make[name]
            self._built[name] = make()
        return self._built[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._arity)

    def __len__(self) -> int:
        return len(self._arity)

    def arity(self, name: str) -> int:
        return self._arity[name]

    def updated(self, name: str, r: Relation) -> "RelationTable":
        out = RelationTable()
        out._arity = dict(self._arity)
        out._built = dict(self._built)
        out._make = dict(self._make)
        out._set(name, r)
        return out


@dataclass(frozen=True)
class Interpretation:
    """A universe plus tables for function and relation symbols.

    Relation tables are positional (index set ``{0..k-1}``).  ``extend_*``
    methods return new interpretations; nothing is mutated in place.
    """

    universe: Universe
    functions: Mapping[str, Function] = field(default_factory=dict)
    relations: Mapping[str, Relation] = field(default_factory=dict)
    modulus: int | None = None

    def __post_init__(self):
        if not isinstance(self.relations, RelationTable):
            object.__setattr__(self, "relations", RelationTable(self.relations))

    def function(self, name: str) -> Function:
        try:
            return self.functions[name]
        except KeyError:
            raise UnknownSymbol(f"unknown function symbol {name!r}") from None

    def relation(self, name: str) -> Relation:
        if name == EQ_SYMBOL:
            return self.diagonal
        try:
            return self.relations[name]
        except KeyError:
            raise UnknownSymbol(f"unknown relation symbol {name!r}") from None

    @property
    def diagonal(self) -> Relation:
        return Relation._trusted((0, 1), self.universe, frozenset((d, d) for d in self.universe.elements))

    def literal(self, value: int) -> int:
        """Map an integer literal of the source language to an element."""
        if self.modulus is not None:
            return value % self.modulus
        if 0 <= value < self.universe.size:
            return value
        raise LiteralOutOfRange(f"literal {value} outside universe of size {self.universe.size}")

    def signature(self, name: str = "M") -> TheoryDecl:
        return TheoryDecl(
            name,
            {f: fn.arity for f, fn in self.functions.items()},
            {p: self.relations.arity(p) for p in self.relations},
        )

    def with_function(self, name: str, f: Function) -> "Interpretation":
        return Interpretation(self.universe, {**self.functions, name: f}, self.relations, self.modulus)

    def with_relation(self, name: str, r: Relation) -> "Interpretation":
        if r.index != tuple(range(len(r.index))):
            raise ArityMismatch(f"relation for {name!r} must be positionally indexed")
        if r.universe != self.universe:
            raise ArityMismatch(f"relation for {name!r} lives in a different universe")
        return Interpretation(self.universe, dict(self.functions), self.relations.updated(name, r), self.modulus)

    def with_relations(self, rels: Mapping[str, Relation]) -> "Interpretation":
        out = self
        for k, v in rels.items():
            out = out.with_relation(k, v)
        return out

    def check_theory(self, theory: TheoryDecl) -> None:
        """Every symbol of ``theory`` must be interpreted with the right arity."""
        for sym, n in theory.functions.items():
            if sym not in self.functions:
                raise UninterpretedSymbol(f"function symbol {sym!r} of theory {theory.name} is not interpreted")
            f = self.functions[sym]
            if f.arity != n:
                raise ArityMismatch(f"{sym!r} declared with arity {n} but interpreted with arity {f.arity}")
        for sym, n in theory.relations.items():
            if sym not in self.relations:
                raise UninterpretedSymbol(f"relation symbol {sym!r} of theory {theory.name} is not interpreted")
            k = self.relations.arity(sym)
            if k != n:
                raise ArityMismatch(f"{sym!r} declared with arity {n} but interpreted with arity {k}")

    def format_element(self, e: int) -> str:
        return self.universe.name(e)


def make_mod_ring(m: int) -> Interpretation:
    """Integers modulo ``m`` as canonical residues."""
    if not isinstance(m, int) or isinstance(m, bool) or m <= 0:
        raise InvalidModulus(f"modulus must be a positive integer, got {m!r}")
    U = Universe(tuple(str(i) for i in range(m)), kind=f"mod({m})")
    funcs = {
        "zero": Function(0, lambda: 0),
        "unit": Function(0, lambda: 1 % m),
        "add": Function(2, lambda x, y: (x + y) % m),
        "sub": Function(2, lambda x, y: (x - y + m) % m),
        "mul": Function(2, lambda x, y: (x * y) % m),
    }

    def lt() -> Relation:
        return Relation._trusted((0, 1), U, frozenset((x, y) for x in range(m) for y in range(x + 1, m)))

    def eq() -> Relation:
        return Relation._trusted((0, 1), U, frozenset((x, x) for x in range(m)))

    rels = RelationTable(lazy={"lt": (2, lt), "eq": (2, eq)})
    return Interpretation(U, funcs, rels, modulus=m)


def make_enum_universe(
    names: Sequence[str],
    relations: Mapping[str, Iterable[Sequence[str]]] | None = None,
    functions: Mapping[str, Mapping[Sequence[str], str]] | None = None,
    arities: Mapping[str, int] | None = None,
) -> Interpretation:
    """An interpretation over named elements with explicit tables.

    ``relations`` maps a symbol to its rows of element names.  ``functions``
    maps a symbol to a table from argument-name tuples to a result name; a
    0-ary function (constant) uses the key ``()``.  ``arities`` pins arities
    for symbols whose tables are empty.
    """
    names = tuple(names)
    if not names:
        raise ValueError("an enum universe needs at least one element")
    U = Universe(names)
    pos = {n: i for i, n in enumerate(names)}
    arities = dict(arities or {})

    def elem(n: str) -> int:
        try:
            return pos[n]
        except KeyError:
            raise UnknownSymbol(f"{n!r} is not an element of the universe") from None

    rels: dict[str, Relation] = {}
    for sym, rows in (relations or {}).items():
        rows = [tuple(r) for r in rows]
        arity = arities.get(sym, len(rows[0]) if rows else None)
        if arity is None:
            raise ArityMismatch(f"cannot infer arity of empty relation {sym!r}")
        for r in rows:
            if len(r) != arity:
                raise ArityMismatch(f"row {r!r} of {sym!r} does not have arity {arity}")
        rels[sym] = Relation.positional(arity, U, [tuple(elem(v) for v in r) for r in rows])

    funcs: dict[str, Function] = {}
    for sym, table in (functions or {}).items():
        keys = [tuple(k) if not isinstance(k, str) else (k,) for k in table]
        arity = arities.get(sym, len(keys[0]) if keys else None)
        if arity is None:
            raise ArityMismatch(f"cannot infer arity of empty function {sym!r}")
        t: dict[tuple[int, ...], int] = {}
        for k, v in zip(keys, table.values()):
            if len(k) != arity:
                raise ArityMismatch(f"argument {k!r} of {sym!r} does not have arity {arity}")
            t[tuple(elem(a) for a in k)] = elem(v)
        for args in itertools.product(U.elements, repeat=arity):
            if args not in t:
                missing = tuple(names[a] for a in args)
                raise PartialFunctionTable(f"function {sym!r} has no value for {missing!r}")
        funcs[sym] = Function.from_table(arity, t)
    return Interpretation(U, funcs, rels)


# ----------------------------------------------------------- axiom checking


@dataclass(frozen=True)
class AxiomResult:
    axiom: Formula
    holds: bool
    witness: Tuple | None = None


@dataclass(frozen=True)
class SatisfactionReport:
    results: tuple[AxiomResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.results)

    @property
    def failures(self) -> list[AxiomResult]:
        return [r for r in self.results if not r.holds]


def _universal_witness(M: Interpretation, axiom: Formula) -> Tuple | None:
    from .semantics import denote

    bound: list[str] = []
    body = axiom
    while isinstance(body, Forall):
        bound.append(body.var)
        body = body.body
    if not bound:
        return None
    failing = complement(denote(M, body))
    if not failing.rows:
        return None
    first = min(failing.rows)
    w = dict(zip(failing.index, first))
    for v in bound:
        w.setdefault(v, 0)
    return Tuple({v: w[v] for v in bound})


def check_satisfies(M: Interpretation, axioms: Iterable[Formula]) -> SatisfactionReport:
    """Truth of each closed axiom in ``M``, with a counterexample when universal."""
    from .semantics import sentence_truth

    results = []
    for ax in axioms:
        fv = free_variables(ax)
        if fv:
            raise NonClosedAxiom(f"axiom has free variables {sorted(fv)}")
        holds = sentence_truth(M, ax)
        results.append(AxiomResult(ax, holds, None if holds else _universal_witness(M, ax)))
    return SatisfactionReport(tuple(results))

