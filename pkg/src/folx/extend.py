"""Extending an interpretation with defined functions and relations.

A ``def`` adds one symbol whose meaning is read off a term or formula in the
current interpretation.  A ``rec`` block adds mutually recursive relation
symbols given by Horn clauses; their meaning is the least fixpoint of the
immediate consequence operator, reached by Kleene iteration from empty
relations.

Two evaluators exist for a Horn block.  :func:`immediate_consequence` is the
reference operator built on :func:`~folx.semantics.denote`; it is exact but
enumerates ``D^|V|`` for atoms with compound arguments.  The default solver
is semi-naive and evaluates clause bodies as indexed nested-loop joins, and
produces the same chain of relations round for round.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import FixpointDivergence, UnknownSymbol, UseBeforeDefinition
from .relalg import (
    Relation,
    Tuple,
    cylindrify,
    project,
    relation_quotient,
    union,
)
from .semantics import _eval, denote
from .syntax import (
    EQ_SYMBOL,
    And,
    App,
    Atom,
    Clause,
    Definition,
    Eq,
    FuncDef,
    HornBlock,
    Lit,
    RelDef,
    Term,
    TheoryDecl,
    Var,
    defined_symbols,
    free_variables,
    term_variables,
    used_symbols,
    validate_definition,
)
from .universe import Function, Interpretation

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtensionState:
    """A theory and interpretation together with the definitions applied so far.

    ``orders`` maps every defined symbol to its extension order: 0 when its
    definition only uses base symbols, otherwise one more than the highest
    order among the defined symbols it uses.
    """

    theory: TheoryDecl
    interpretation: Interpretation
    log: tuple[tuple[int, Definition], ...] = ()
    orders: Mapping[str, int] = field(default_factory=dict)
    traces: Mapping[str, tuple[dict[str, int], ...]] = field(default_factory=dict)

    @classmethod
    def initial(cls, M: Interpretation, theory: TheoryDecl | None = None) -> "ExtensionState":
        """Start from ``M``; the theory is ``M``'s full signature plus ``theory``'s name."""
        if theory is not None:
            M.check_theory(theory)
        name = theory.name if theory is not None else "M"
        return cls(M.signature(name), M)

    def order_of(self, d: Definition) -> int:
        used = [self.orders[s] for s in used_symbols(d) if s in self.orders]
        return 1 + max(used) if used else 0

    def _record(self, d: Definition, theory: TheoryDecl, M: Interpretation, **extra) -> "ExtensionState":
        order = self.order_of(d)
        orders = dict(self.orders)
        for s in defined_symbols(d):
            orders[s] = order
        return ExtensionState(theory, M, self.log + ((order, d),), orders, extra.get("traces", self.traces))


def extend_function(state: ExtensionState, d: FuncDef) -> ExtensionState:
    """Interpret ``d.symbol`` by ``(a_0..a_{n-1}) -> M_A(body)``, ``A = a ∘ params⁻¹``."""
    validate_definition(d, state.theory)
    M = state.interpretation
    params, body = d.params, d.body

    def fn(*args: int) -> int:
        # dict(zip(...)) is compose(Tuple.positional(args), inverse(Tuple.positional(params)))
        return _eval(M, dict(zip(params, args)), body)

    theory = state.theory.with_function(d.symbol, len(params))
    return state._record(d, theory, M.with_function(d.symbol, Function(len(params), fn)))


def to_positional(r: Relation, params: Sequence[str]) -> Relation:
    """Quotient of a named relation by the inverse parameter enumeration."""
    return relation_quotient(r, Tuple({x: i for i, x in enumerate(params)}))


def extend_relation(state: ExtensionState, d: RelDef) -> ExtensionState:
    """Interpret ``d.symbol`` by ``M(body) / (x_0, ..., x_{n-1})``."""
    validate_definition(d, state.theory)
    M = state.interpretation
    rel = to_positional(denote(M, d.body), d.params)
    theory = state.theory.with_relation(d.symbol, len(d.params))
    return state._record(d, theory, M.with_relation(d.symbol, rel))


# ------------------------------------------------------------ Horn systems


@dataclass(frozen=True)
class HornSystem:
    arities: Mapping[str, int]
    clauses: tuple[Clause, ...]
    interpretation: Interpretation

    @classmethod
    def from_block(cls, block: HornBlock, M: Interpretation) -> "HornSystem":
        return cls(dict(block.symbols), block.clauses, M)

    @property
    def universe(self):
        return self.interpretation.universe

    def bottom(self) -> dict[str, Relation]:
        return {p: Relation.positional(n, self.universe) for p, n in self.arities.items()}

    def max_iterations(self) -> int:
        return 1 + sum(self.universe.size**n for n in self.arities.values())


def clause_consequence(sys: HornSystem, clause: Clause, current: Mapping[str, Relation]) -> Relation:
    """One clause's contribution: body denotation over the head variables, made positional."""
    M = sys.interpretation.with_relations(current)
    head_vars = clause.head_vars
    body = denote(M, And(clause.body))
    kept = project(body, [v for v in body.index if v in head_vars])
    full = cylindrify(kept, [v for v in head_vars if v not in kept.index])
    return to_positional(full, head_vars)


def immediate_consequence(sys: HornSystem, current: Mapping[str, Relation]) -> dict[str, Relation]:
    """The operator ``T``: union over each symbol's clauses of their consequences."""
    out = sys.bottom()
    for c in sys.clauses:
        p = c.head.symbol
        out[p] = union(out[p], clause_consequence(sys, c, current))
    return out


# ------------------------------------------------------- join-plan evaluator


def _ready(t: Term, bound: set[str]) -> bool:
    return isinstance(t, Lit) or term_variables(t) <= bound


class _BodyPlanner:
    """Evaluates a clause body against row sets by indexed nested-loop joins."""

    def __init__(self, sys: HornSystem):
        self.sys = sys
        self.M = sys.interpretation
        self.elements = list(sys.universe.elements)
        self._index: dict = {}

    def reset(self) -> None:
        self._index.clear()

    def _lookup(self, tag, rows, keypos: tuple[int, ...]) -> dict:
        key = (tag, keypos)
        idx = self._index.get(key)
        if idx is None:
            idx = defaultdict(list)
            for row in rows:
                idx[tuple(row[p] for p in keypos)].append(row)
            self._index[key] = idx
        return idx

    def _choose(self, literals, pending, bound, sizes, delta_at):
        best, best_score = None, None
        for k in pending:
            lit = literals[k]
            if isinstance(lit, Eq):
                lr, rr = _ready(lit.left, bound), _ready(lit.right, bound)
                if lr and rr:
                    score = 0
                elif (lr and isinstance(lit.right, Var)) or (rr and isinstance(lit.left, Var)):
                    score = 1
                else:
                    continue
            else:
                if not all(_ready(a, bound) for a in lit.args if isinstance(a, App)):
                    continue
                outputs = [a for a in lit.args if isinstance(a, Var) and a.name not in bound]
                if not outputs:
                    score = 0
                elif k == delta_at:
                    score = 1
                else:
                    score = 2 + sizes[k]
            if best_score is None or score < best_score:
                best, best_score = k, score
        return best

    def solve(self, clause: Clause, sources: Sequence, tags: Sequence, delta_at: int | None = None) -> set[tuple]:
        literals = clause.body
        bindings: list[dict] = [{}]
        bound: set[str] = set()
        pending = list(range(len(literals)))
        sizes = [len(s) if s is not None else 0 for s in sources]
        while pending and bindings:
            k = self._choose(literals, pending, bound, sizes, delta_at)
            if k is None:
                # nothing is evaluable yet: enumerate one variable over the universe
                waiting = set()
                for j in pending:
                    waiting |= free_variables(literals[j])
                var = min(waiting - bound)
                bindings = [{**b, var: d} for b in bindings for d in self.elements]
                bound.add(var)
                continue
            pending.remove(k)
            lit = literals[k]
            if isinstance(lit, Eq):
                bindings = self._eq(lit, bindings, bound)
            else:
                bindings = self._atom(lit, sources[k], tags[k], bindings, bound)
            bound |= free_variables(lit)
        head = clause.head_vars
        out: set[tuple] = set()
        missing = [v for v in head if v not in bound]
        for b in bindings:
            if missing:
                for combo in itertools.product(self.elements, repeat=len(missing)):
                    full = {**b, **dict(zip(missing, combo))}
                    out.add(tuple(full[v] for v in head))
            else:
                out.add(tuple(b[v] for v in head))
        return out

    def _eq(self, lit: Eq, bindings, bound):
        M = self.M
        if _ready(lit.left, bound) and _ready(lit.right, bound):
            return [b for b in bindings if _eval(M, b, lit.left) == _eval(M, b, lit.right)]
        var, other = (lit.left, lit.right) if isinstance(lit.left, Var) and lit.left.name not in bound else (lit.right, lit.left)
        return [{**b, var.name: _eval(M, b, other)} for b in bindings]

    def _atom(self, lit: Atom, rows, tag, bindings, bound):
        M = self.M
        keypos, keyterms = [], []
        outs: dict[str, list[int]] = {}
        for p, a in enumerate(lit.args):
            if isinstance(a, Var) and a.name not in bound:
                outs.setdefault(a.name, []).append(p)
            else:
                keypos.append(p)
                keyterms.append(a)
        idx = self._lookup(tag, rows, tuple(keypos))
        out_items = list(outs.items())
        result = []
        for b in bindings:
            key = tuple(_eval(M, b, t) for t in keyterms)
            for row in idx.get(key, ()):
                ext = dict(b)
                ok = True
                for name, ps in out_items:
                    v = row[ps[0]]
                    if any(row[q] != v for q in ps[1:]):
                        ok = False
                        break
                    ext[name] = v
                if ok:
                    result.append(ext)
        return result


def _literal_symbol(lit) -> str:
    return EQ_SYMBOL if isinstance(lit, Eq) else lit.symbol


@dataclass
class FixpointResult:
    relations: dict[str, Relation]
    trace: list[dict[str, int]]

    @property
    def iterations(self) -> int:
        return len(self.trace)


def _seminaive(sys: HornSystem, max_iterations: int | None) -> FixpointResult:
    M = sys.interpretation
    new_syms = set(sys.arities)
    planner = _BodyPlanner(sys)
    full: dict[str, set[tuple]] = {p: set() for p in sys.arities}
    old_rows = {}
    for c in sys.clauses:
        for lit in c.body:
            s = _literal_symbol(lit)
            if s not in new_syms and s not in old_rows:
                old_rows[s] = M.relation(s).rows
    occurrences = [
        [k for k, lit in enumerate(c.body) if isinstance(lit, Atom) and lit.symbol in new_syms] for c in sys.clauses
    ]
    cap = max_iterations if max_iterations is not None else sys.max_iterations()
    trace: list[dict[str, int]] = []
    delta: dict[str, set[tuple]] | None = None
    while True:
        if len(trace) >= cap:
            raise FixpointDivergence(f"fixpoint not reached within {cap} iterations")
        planner.reset()
        derived: dict[str, set[tuple]] = {p: set() for p in sys.arities}
        for c, occ in zip(sys.clauses, occurrences):
            head = c.head.symbol
            if delta is None:
                sources = [full[_literal_symbol(l)] if _literal_symbol(l) in new_syms else old_rows[_literal_symbol(l)] for l in c.body]
                tags = [("full" if _literal_symbol(l) in new_syms else "old", _literal_symbol(l)) for l in c.body]
                derived[head] |= planner.solve(c, sources, tags)
                continue
            for k in occ:
                if not delta[c.body[k].symbol]:
                    continue
                sources, tags = [], []
                for j, l in enumerate(c.body):
                    s = _literal_symbol(l)
                    if j == k:
                        sources.append(delta[s])
                        tags.append(("delta", s))
                    elif s in new_syms:
                        sources.append(full[s])
                        tags.append(("full", s))
                    else:
                        sources.append(old_rows[s])
                        tags.append(("old", s))
                derived[head] |= planner.solve(c, sources, tags, delta_at=k)
        delta = {p: derived[p] - full[p] for p in sys.arities}
        for p in sys.arities:
            full[p] |= delta[p]
        trace.append({p: len(full[p]) for p in sorted(sys.arities)})
        log.debug("semi-naive round %d: %s", len(trace), trace[-1])
        if not any(delta.values()):
            break
    U = sys.universe
    rels = {p: Relation._trusted(tuple(range(n)), U, frozenset(full[p])) for p, n in sys.arities.items()}
    return FixpointResult(rels, trace)


def _naive(sys: HornSystem, max_iterations: int | None) -> FixpointResult:
    current = sys.bottom()
    cap = max_iterations if max_iterations is not None else sys.max_iterations()
    trace: list[dict[str, int]] = []
    while True:
        if len(trace) >= cap:
            raise FixpointDivergence(f"fixpoint not reached within {cap} iterations")
        nxt = immediate_consequence(sys, current)
        trace.append({p: len(nxt[p]) for p in sorted(sys.arities)})
        if nxt == current:
            return FixpointResult(nxt, trace)
        current = nxt


def planned_consequence(sys: HornSystem, current: Mapping[str, Relation]) -> dict[str, Relation]:
    """``T`` evaluated with the join planner instead of full enumeration."""
    M = sys.interpretation
    planner = _BodyPlanner(sys)
    out = {p: set() for p in sys.arities}
    for c in sys.clauses:
        sources, tags = [], []
        for l in c.body:
            s = _literal_symbol(l)
            sources.append(current[s].rows if s in sys.arities else M.relation(s).rows)
            tags.append((s in sys.arities, s))
        out[c.head.symbol] |= planner.solve(c, sources, tags)
    U = sys.universe
    return {p: Relation._trusted(tuple(range(n)), U, frozenset(out[p])) for p, n in sys.arities.items()}


def least_fixpoint(sys: HornSystem, strategy: str = "seminaive", max_iterations: int | None = None) -> FixpointResult:
    if strategy == "seminaive":
        result = _seminaive(sys, max_iterations)
        if planned_consequence(sys, result.relations) != result.relations:
            raise FixpointDivergence("semi-naive result is not a fixpoint")
        return result
    if strategy == "naive":
        return _naive(sys, max_iterations)
    raise ValueError(f"unknown strategy {strategy!r}")


def solve_horn(
    state: ExtensionState,
    block: HornBlock,
    strategy: str = "seminaive",
    max_iterations: int | None = None,
) -> ExtensionState:
    """Add the block's symbols bound to the least solution of its equations."""
    validate_definition(block, state.theory)
    sys = HornSystem.from_block(block, state.interpretation)
    result = least_fixpoint(sys, strategy, max_iterations)
    theory = state.theory
    for p, n in block.symbols:
        theory = theory.with_relation(p, n)
    M = state.interpretation.with_relations(result.relations)
    traces = {**state.traces, block.name: tuple(result.trace)}
    return state._record(block, theory, M, traces=traces)


def fixpoint_trace(state: ExtensionState, block: HornBlock, strategy: str = "seminaive") -> list[dict[str, int]]:
    """Per-iteration relation sizes for ``block`` solved over ``state``."""
    validate_definition(block, state.theory)
    return least_fixpoint(HornSystem.from_block(block, state.interpretation), strategy).trace


def apply_definition(state: ExtensionState, d: Definition, **kw) -> ExtensionState:
    if isinstance(d, FuncDef):
        return extend_function(state, d)
    if isinstance(d, RelDef):
        return extend_relation(state, d)
    if isinstance(d, HornBlock):
        return solve_horn(state, d, **kw)
    raise TypeError(f"not a definition: {d!r}")


def apply_program(state: ExtensionState, defs: Iterable[Definition], **kw) -> ExtensionState:
    """Left fold of the extensions in ``defs`` over ``state``."""
    defs = list(defs)
    for i, d in enumerate(defs):
        later = {s for e in defs[i + 1 :] for s in defined_symbols(e)}
        early = (used_symbols(d) - set(defined_symbols(d))) & later
        early = {s for s in early if not state.theory.has(s)}
        if early:
            raise UseBeforeDefinition(f"{sorted(early)[0]!r} is used before its definition", d.span)
        state = apply_definition(state, d, **kw)
    return state


def relation_of(state: ExtensionState, symbol: str) -> Relation:
    if symbol not in state.theory.relations and symbol != EQ_SYMBOL:
        raise UnknownSymbol(f"unknown relation symbol {symbol!r}")
    return state.interpretation.relation(symbol)

