"""Brute-force oracles and random generators shared by the tests.

Everything here is deliberately naive and independent of the code paths it
checks: no quotients, joins or planners, only enumeration of assignments.
"""

from __future__ import annotations

import itertools
import random

from folx.relalg import Relation, Tuple, Universe
from folx.syntax import (
    And,
    App,
    Atom,
    Clause,
    Eq,
    Exists,
    Forall,
    HornBlock,
    Implies,
    Lit,
    Not,
    Or,
    Var,
)
from folx.universe import Function, Interpretation

VARS = ("x", "y", "z")


def brute_function_quotient(h: Tuple, f: Tuple, target, universe: Universe) -> set[Tuple]:
    target = sorted(target)
    out = set()
    for combo in itertools.product(universe.elements, repeat=len(target)):
        g = dict(zip(target, combo))
        if all(g[f[i]] == h[i] for i in f.index):
            out.add(Tuple(g))
    return out


def term_value(M: Interpretation, A: dict, t) -> int:
    if isinstance(t, Var):
        return A[t.name]
    if isinstance(t, Lit):
        return M.literal(t.value)
    return M.functions[t.symbol](*[term_value(M, A, a) for a in t.args])


def truth_value(M: Interpretation, A: dict, F) -> bool:
    """Textbook satisfaction, handling sugar directly instead of desugaring."""
    if isinstance(F, Atom):
        rows = M.relations[F.symbol].rows
        return tuple(term_value(M, A, a) for a in F.args) in rows
    if isinstance(F, Eq):
        return term_value(M, A, F.left) == term_value(M, A, F.right)
    if isinstance(F, And):
        return all(truth_value(M, A, p) for p in F.parts)
    if isinstance(F, Or):
        return any(truth_value(M, A, p) for p in F.parts)
    if isinstance(F, Not):
        return not truth_value(M, A, F.body)
    if isinstance(F, Implies):
        return (not truth_value(M, A, F.antecedent)) or truth_value(M, A, F.consequent)
    if isinstance(F, Exists):
        return any(truth_value(M, {**A, F.var: d}, F.body) for d in M.universe.elements)
    if isinstance(F, Forall):
        return all(truth_value(M, {**A, F.var: d}, F.body) for d in M.universe.elements)
    raise TypeError(F)


def brute_atom_relation(M: Interpretation, symbol: str, args: tuple) -> set[Tuple]:
    """``{A in V -> D | (M_A(t_0), ...) in M(p)}`` by enumeration."""
    V = sorted({a.name for a in args if isinstance(a, Var)})
    rows = M.relations[symbol].rows
    out = set()
    for combo in itertools.product(M.universe.elements, repeat=len(V)):
        A = dict(zip(V, combo))
        if tuple(A[a.name] for a in args) in rows:
            out.add(Tuple(A))
    return out


def euclid_gcd(a: int, b: int) -> int | None:
    """Subtraction-only Euclid on positive integers; None when it never stops."""
    if a <= 0 or b <= 0:
        return a if a == b else None
    while a != b:
        if a < b:
            b -= a
        else:
            a -= b
    return a


# ------------------------------------------------------------ generators


def random_relation(rng: random.Random, U: Universe, arity: int, density: float | None = None) -> Relation:
    density = rng.random() if density is None else density
    rows = [r for r in itertools.product(U.elements, repeat=arity) if rng.random() < density]
    return Relation.positional(arity, U, rows)


def random_interpretation(rng: random.Random, size: int) -> Interpretation:
    """Universe of ``size`` with p/1, r/2, s/3, constant c, f/1, g/2."""
    U = Universe(tuple("abcd"[:size]))
    rels = {"p": random_relation(rng, U, 1), "r": random_relation(rng, U, 2), "s": random_relation(rng, U, 3)}
    tf = {(a,): rng.randrange(size) for a in U.elements}
    tg = {(a, b): rng.randrange(size) for a in U.elements for b in U.elements}
    funcs = {
        "c": Function.from_table(0, {(): rng.randrange(size)}),
        "f": Function.from_table(1, tf),
        "g": Function.from_table(2, tg),
    }
    return Interpretation(U, funcs, rels)


RELS = {"p": 1, "r": 2, "s": 3}


def random_term(rng: random.Random, depth: int):
    roll = rng.random()
    if depth <= 0 or roll < 0.6:
        return Var(rng.choice(VARS))
    if roll < 0.7:
        return App("c")
    if roll < 0.85:
        return App("f", (random_term(rng, depth - 1),))
    return App("g", (random_term(rng, depth - 1), random_term(rng, depth - 1)))


def random_atom(rng: random.Random, term_depth: int = 1):
    if rng.random() < 0.15:
        return Eq(random_term(rng, term_depth), random_term(rng, term_depth))
    sym = rng.choice(sorted(RELS))
    return Atom(sym, tuple(random_term(rng, term_depth) for _ in range(RELS[sym])))


def random_formula(rng: random.Random, depth: int = 4, sugar: bool = True):
    if depth <= 0 or rng.random() < 0.25:
        return random_atom(rng)
    kinds = ["and", "not", "exists"] + (["or", "implies", "forall"] if sugar else [])
    k = rng.choice(kinds)
    if k == "and":
        return And(tuple(random_formula(rng, depth - 1, sugar) for _ in range(rng.randrange(0, 4))))
    if k == "or":
        return Or(tuple(random_formula(rng, depth - 1, sugar) for _ in range(rng.randrange(0, 4))))
    if k == "not":
        return Not(random_formula(rng, depth - 1, sugar))
    if k == "implies":
        return Implies(random_formula(rng, depth - 1, sugar), random_formula(rng, depth - 1, sugar))
    q = Exists if k == "exists" else Forall
    return q(rng.choice(VARS), random_formula(rng, depth - 1, sugar))


def formula_depth(F) -> int:
    if isinstance(F, (Atom, Eq)):
        return 0
    if isinstance(F, (And, Or)):
        return 1 + max((formula_depth(p) for p in F.parts), default=0)
    if isinstance(F, (Not, Exists, Forall)):
        return 1 + formula_depth(F.body)
    return 1 + max(formula_depth(F.antecedent), formula_depth(F.consequent))


def random_horn_block(rng: random.Random, n_symbols: int = 2) -> HornBlock:
    """Up to two new symbols of arity 1 or 2 over old relations ``p``/``r``."""
    names = ["h", "k"][:n_symbols]
    arities = {n: rng.choice([1, 2]) for n in names}
    all_rels = {**arities, "p": 1, "r": 2}
    pool = ["u", "v", "w"]
    clauses = []
    for _ in range(rng.randrange(1, 5)):
        h = rng.choice(names)
        head_vars = rng.sample(pool, arities[h])
        body = []
        for _ in range(rng.randrange(0, 3)):
            if rng.random() < 0.15:
                body.append(Eq(Var(rng.choice(pool)), rng.choice([Var(rng.choice(pool)), App("f", (Var(rng.choice(pool)),))])))
                continue
            sym = rng.choice(sorted(all_rels))
            args = []
            for _ in range(all_rels[sym]):
                args.append(App("f", (Var(rng.choice(pool)),)) if rng.random() < 0.15 else Var(rng.choice(pool)))
            body.append(Atom(sym, tuple(args)))
        clauses.append(Clause(Atom(h, tuple(Var(v) for v in head_vars)), tuple(body)))
    return HornBlock(tuple(arities.items()), tuple(clauses))


def ground_program(M: Interpretation, block: HornBlock) -> list[tuple[tuple, tuple]]:
    """Ground every clause over the universe.

    Literals over old symbols are decided here with :func:`truth_value`; what
    remains per instance is ``(head_fact, new_body_facts)`` where a fact is
    ``(symbol, row)``.
    """
    new = {n for n, _ in block.symbols}
    rules = set()
    for c in block.clauses:
        vs = sorted({v for lit in (c.head, *c.body) for v in _vars(lit)})
        for combo in itertools.product(M.universe.elements, repeat=len(vs)):
            A = dict(zip(vs, combo))
            facts = []
            ok = True
            for lit in c.body:
                if isinstance(lit, Atom) and lit.symbol in new:
                    facts.append((lit.symbol, tuple(term_value(M, A, a) for a in lit.args)))
                elif not truth_value(M, A, lit):
                    ok = False
                    break
            if ok:
                head = (c.head.symbol, tuple(A[a.name] for a in c.head.args))
                rules.add((head, tuple(sorted(set(facts)))))
    return sorted(rules)


def apply_ground(rules, facts: frozenset) -> frozenset:
    return frozenset(h for h, body in rules if all(b in facts for b in body))


def all_cells(U: Universe, arities: dict[str, int]) -> list[tuple]:
    return [(n, row) for n in sorted(arities) for row in itertools.product(U.elements, repeat=arities[n])]


def all_solutions_naive(M: Interpretation, block: HornBlock) -> list[frozenset]:
    """Every fixed point of the ground operator, by trying all 2^cells fact sets."""
    rules = ground_program(M, block)
    cells = all_cells(M.universe, dict(block.symbols))
    sols = []
    for mask in itertools.product((0, 1), repeat=len(cells)):
        S = frozenset(c for c, bit in zip(cells, mask) if bit)
        if apply_ground(rules, S) == S:
            sols.append(S)
    return sols


def all_solutions(M: Interpretation, block: HornBlock) -> list[frozenset]:
    """Every fixed point of the ground operator, by exhaustive backtracking.

    Cells are decided in a fixed order.  A partial assignment is abandoned as
    soon as some rule has a true body and a false head (closure), or some true
    cell has lost every rule that could derive it (support).  Both checks fire
    only once all cells they mention are decided, so no solution is skipped.
    """
    rules = ground_program(M, block)
    cells = all_cells(M.universe, dict(block.symbols))
    pos = {c: i for i, c in enumerate(cells)}
    ground = [(pos[h], tuple(pos[b] for b in body)) for h, body in rules]
    n = len(cells)
    closure_at: list[list[tuple[int, tuple]]] = [[] for _ in range(n)]
    for h, body in ground:
        closure_at[max((h, *body))].append((h, body))
    support: list[list[tuple]] = [[] for _ in range(n)]
    for h, body in ground:
        support[h].append(body)
    support_at: list[list[int]] = [[] for _ in range(n)]
    for c in range(n):
        last = max([c, *(b for body in support[c] for b in body)])
        support_at[last].append(c)

    bits = [False] * n
    sols: list[frozenset] = []

    def ok(k: int) -> bool:
        for h, body in closure_at[k]:
            if not bits[h] and all(bits[b] for b in body):
                return False
        for c in support_at[k]:
            if bits[c] and not any(all(bits[b] for b in body) for body in support[c]):
                return False
        return True

    def go(k: int) -> None:
        if k == n:
            sols.append(frozenset(cells[i] for i in range(n) if bits[i]))
            return
        for v in (False, True):
            bits[k] = v
            if ok(k):
                go(k + 1)
        bits[k] = False

    go(0)
    return sols


def as_facts(rels: dict[str, Relation]) -> frozenset:
    return frozenset((n, row) for n, r in rels.items() for row in r.rows)


def brute_consequence(M: Interpretation, block: HornBlock, current: dict[str, Relation]) -> dict[str, Relation]:
    facts = apply_ground(ground_program(M, block), as_facts(current))
    out = {n: set() for n, _ in block.symbols}
    for n, row in facts:
        out[n].add(row)
    return {n: Relation.positional(k, M.universe, out[n]) for n, k in block.symbols}


def _vars(F) -> set[str]:
    from folx.syntax import free_variables

    return set(free_variables(F))
