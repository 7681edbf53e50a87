"""Tuples as finite functions on index sets, and relations as sets of them.

An index is either a variable name (a non-empty identifier) or a position
(a natural number); one index set never mixes the two.  Universe elements are
the canonical integers ``0..n-1`` of a finite :class:`Universe`.

Tuples are immutable and stored as parallel sorted ``(index, value)``
sequences, so equal tuples compare and hash equal regardless of how they
were built.  A :class:`Relation` keeps its rows as plain Python tuples in the
sorted order of its index set; :attr:`Relation.tuples` materializes them as
:class:`Tuple` values when needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    CompositionTypeMismatch,
    IndexNotPresent,
    IndexSetMismatch,
    IndexSetOverlap,
    MixedIndexSet,
    UniverseMismatch,
)

Index = Union[str, int]


def _check_index(i: object) -> None:
    if isinstance(i, bool):
        raise MixedIndexSet(f"invalid index {i!r}")
    if isinstance(i, int):
        if i < 0:
            raise MixedIndexSet(f"positional index must be natural, got {i}")
    elif isinstance(i, str):
        if not i.isidentifier():
            raise MixedIndexSet(f"index name must be an identifier, got {i!r}")
    else:
        raise MixedIndexSet(f"invalid index {i!r}")


def sort_indices(indices: Iterable[Index]) -> tuple[Index, ...]:
    """Canonical order of an index set; rejects mixed name/position sets."""
    idx = tuple(indices)
    kinds = set()
    for i in idx:
        _check_index(i)
        kinds.add(isinstance(i, int))
    if len(kinds) > 1:
        raise MixedIndexSet(f"index set mixes names and positions: {idx!r}")
    return tuple(sorted(set(idx)))


@dataclass(frozen=True)
class Universe:
    """A finite universe of discourse; elements are ``0..size-1``."""

    names: tuple[str, ...]
    kind: str = "enum"

    def __post_init__(self):
        if not self.names:
            raise ValueError("a universe needs at least one element")
        if len(set(self.names)) != len(self.names):
            raise ValueError("element names must be distinct")

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def elements(self) -> range:
        return range(len(self.names))

    def name(self, element: int) -> str:
        return self.names[element]

    def __contains__(self, element: object) -> bool:
        return isinstance(element, int) and 0 <= element < len(self.names)

    def __repr__(self) -> str:
        if self.kind.startswith("mod"):
            return f"Universe({self.kind})"
        return f"Universe({', '.join(self.names)})"


@dataclass(frozen=True, init=False)
class Tuple:
    """A total finite map from an index set to values."""

    index: tuple[Index, ...]
    values: tuple[Hashable, ...]

    def __init__(self, entries: Mapping[Index, Hashable] | Iterable[tuple[Index, Hashable]] = ()):
        items = dict(entries)
        index = sort_indices(items)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "values", tuple(items[i] for i in index))

    @classmethod
    def positional(cls, values: Sequence[Hashable]) -> "Tuple":
        return cls(enumerate(values))

    @classmethod
    def _raw(cls, index: tuple[Index, ...], values: tuple) -> "Tuple":
        t = object.__new__(cls)
        object.__setattr__(t, "index", index)
        object.__setattr__(t, "values", values)
        return t

    @property
    def index_set(self) -> frozenset[Index]:
        return frozenset(self.index)

    def __getitem__(self, i: Index) -> Hashable:
        try:
            return self.values[self.index.index(i)]
        except ValueError:
            raise IndexNotPresent(f"index {i!r} not in tuple") from None

    def get(self, i: Index, default=None):
        try:
            return self[i]
        except IndexNotPresent:
            return default

    def items(self) -> Iterator[tuple[Index, Hashable]]:
        return zip(self.index, self.values)

    def as_dict(self) -> dict[Index, Hashable]:
        return dict(zip(self.index, self.values))

    def __len__(self) -> int:
        return len(self.index)

    def __repr__(self) -> str:
        if self.index and isinstance(self.index[0], int) and self.index == tuple(range(len(self.index))):
            return f"Tuple.positional({list(self.values)!r})"
        return f"Tuple({self.as_dict()!r})"


EMPTY_TUPLE = Tuple()


def restrict(t: Tuple, subset: Iterable[Index]) -> Tuple:
    """The restriction of ``t`` to ``subset``."""
    d = t.as_dict()
    sub = set(subset)
    missing = sub - d.keys()
    if missing:
        raise IndexNotPresent(f"indices {sorted(map(str, missing))} not in tuple")
    return Tuple({i: d[i] for i in sub})


def compose(g: Tuple, f: Tuple) -> Tuple:
    """``g ∘ f``: index set of ``f``, value ``g(f(i))`` at ``i``."""
    gd = g.as_dict()
    out = {}
    for i, v in f.items():
        if v not in gd:
            raise CompositionTypeMismatch(f"value {v!r} of f at {i!r} is not an index of g")
        out[i] = gd[v]
    return Tuple(out)


def inverse(f: Tuple) -> Tuple:
    """Inverse of an injective tuple whose values are indices."""
    if len(set(f.values)) != len(f.values):
        raise CompositionTypeMismatch("tuple is not injective and has no inverse")
    return Tuple({v: i for i, v in f.items()})


def function_quotient(h: Tuple, f: Tuple, target: Iterable[Index], universe: Universe) -> set[Tuple]:
    """All ``g : target -> universe`` with ``g ∘ f == h``."""
    if h.index != f.index:
        raise IndexSetMismatch(f"h indexed by {h.index!r} but f by {f.index!r}")
    target = sort_indices(target)
    forced: dict[Index, Hashable] = {}
    for i, tgt in f.items():
        if tgt not in target:
            raise CompositionTypeMismatch(f"value {tgt!r} of f is outside the target index set")
        hv = h.values[f.index.index(i)]
        if forced.setdefault(tgt, hv) != hv:
            return set()
    free = [i for i in target if i not in forced]
    out = set()
    for combo in itertools.product(universe.elements, repeat=len(free)):
        g = dict(forced)
        g.update(zip(free, combo))
        out.add(Tuple._raw(target, tuple(g[i] for i in target)))
    return out


class Relation:
    """A finite set of same-typed tuples over a finite universe.

    ``rows`` are value tuples ordered by the sorted index set.  Instances are
    immutable; equality is by index set, universe and rows.
    """

    __slots__ = ("index", "universe", "rows", "_hash")

    def __init__(self, index: Iterable[Index], universe: Universe, rows: Iterable[tuple] = ()):
        index = sort_indices(index)
        rows = frozenset(tuple(r) for r in rows)
        n = len(index)
        for r in rows:
            if len(r) != n:
                raise IndexSetMismatch(f"row {r!r} does not match index set {index!r}")
            for v in r:
                if v not in universe:
                    raise UniverseMismatch(f"value {v!r} is not an element of {universe!r}")
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _trusted(cls, index: tuple[Index, ...], universe: Universe, rows: frozenset) -> "Relation":
        r = object.__new__(cls)
        object.__setattr__(r, "index", index)
        object.__setattr__(r, "universe", universe)
        object.__setattr__(r, "rows", rows)
        object.__setattr__(r, "_hash", None)
        return r

    @classmethod
    def from_tuples(cls, index: Iterable[Index], universe: Universe, tuples: Iterable[Tuple]) -> "Relation":
        index = sort_indices(index)
        rows = []
        for t in tuples:
            if t.index != index:
                raise IndexSetMismatch(f"tuple indexed by {t.index!r}, relation by {index!r}")
            rows.append(t.values)
        return cls(index, universe, rows)

    @classmethod
    def positional(cls, arity: int, universe: Universe, rows: Iterable[Sequence[int]] = ()) -> "Relation":
        return cls(range(arity), universe, rows)

    def __setattr__(self, name, value):
        raise AttributeError("Relation is immutable")

    @property
    def index_set(self) -> frozenset[Index]:
        return frozenset(self.index)

    @property
    def tuples(self) -> frozenset[Tuple]:
        return frozenset(Tuple._raw(self.index, r) for r in self.rows)

    def sorted_rows(self) -> list[tuple]:
        return sorted(self.rows)

    def __contains__(self, t: object) -> bool:
        if isinstance(t, Tuple):
            return t.index == self.index and t.values in self.rows
        return tuple(t) in self.rows  # type: ignore[arg-type]

    def __iter__(self) -> Iterator[Tuple]:
        for r in self.sorted_rows():
            yield Tuple._raw(self.index, r)

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self.index == other.index and self.universe == other.universe and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.index, self.universe, self.rows)))
        return self._hash

    def __le__(self, other: "Relation") -> bool:
        _same_type(self, other)
        return self.rows <= other.rows

    def __repr__(self) -> str:
        return f"Relation({list(self.index)!r}, {len(self.rows)} rows)"

    @property
    def is_truth(self) -> bool:
        return not self.index and bool(self.rows)


def full_relation(index: Iterable[Index], universe: Universe) -> Relation:
    index = sort_indices(index)
    rows = frozenset(itertools.product(universe.elements, repeat=len(index)))
    return Relation._trusted(index, universe, rows)


def empty_relation(index: Iterable[Index], universe: Universe) -> Relation:
    return Relation._trusted(sort_indices(index), universe, frozenset())


def truth(universe: Universe) -> Relation:
    return Relation._trusted((), universe, frozenset({()}))


def falsity(universe: Universe) -> Relation:
    return Relation._trusted((), universe, frozenset())


def _same_universe(r0: Relation, r1: Relation) -> None:
    if r0.universe != r1.universe:
        raise UniverseMismatch(f"{r0.universe!r} vs {r1.universe!r}")


def _same_type(r0: Relation, r1: Relation) -> None:
    if r0.index != r1.index:
        raise IndexSetMismatch(f"index sets differ: {r0.index!r} vs {r1.index!r}")
    _same_universe(r0, r1)


def _positions(index: tuple[Index, ...], sub: Sequence[Index]) -> tuple[int, ...]:
    return tuple(index.index(i) for i in sub)


def relation_quotient(H: Relation, f: Tuple) -> Relation:
    """``H/f``: the union of ``h/f`` over ``h`` in ``H``.

    The target index set is the set of values of ``f``.  Works row by row
    through :func:`function_quotient`'s forcing logic without materializing
    intermediate :class:`Tuple` objects.
    """
    if f.index != H.index:
        raise IndexSetMismatch(f"f indexed by {f.index!r} but relation by {H.index!r}")
    target = sort_indices(f.values)
    slot = {t: k for k, t in enumerate(target)}
    where = [slot[v] for v in f.values]
    covered = set(where)
    free = [k for k in range(len(target)) if k not in covered]
    fillers = list(itertools.product(H.universe.elements, repeat=len(free)))
    rows = set()
    for h in H.rows:
        g: list = [None] * len(target)
        ok = True
        for pos, k in enumerate(where):
            v = h[pos]
            if g[k] is None:
                g[k] = v
            elif g[k] != v:
                ok = False
                break
        if not ok:
            continue
        if not free:
            rows.add(tuple(g))
            continue
        for combo in fillers:
            for k, v in zip(free, combo):
                g[k] = v
            rows.add(tuple(g))
    return Relation._trusted(target, H.universe, frozenset(rows))


def rename(r: Relation, mapping: Mapping[Index, Index]) -> Relation:
    """Rename indices of ``r`` through a bijection; a quotient by a bijection."""
    return relation_quotient(r, Tuple({i: mapping[i] for i in r.index}))


def project(r: Relation, subset: Iterable[Index]) -> Relation:
    sub = sort_indices(subset)
    missing = set(sub) - set(r.index)
    if missing:
        raise IndexNotPresent(f"indices {sorted(map(str, missing))} not in relation")
    if sub == r.index:
        return r
    pos = _positions(r.index, sub)
    return Relation._trusted(sub, r.universe, frozenset(tuple(row[p] for p in pos) for row in r.rows))


def join(r0: Relation, r1: Relation) -> Relation:
    """Natural join; hashes the smaller side on the common indices."""
    _same_universe(r0, r1)
    out_index = sort_indices(set(r0.index) | set(r1.index))
    common = [i for i in r0.index if i in set(r1.index)]
    if len(r0.rows) > len(r1.rows):
        r0, r1 = r1, r0
    c0 = _positions(r0.index, common)
    c1 = _positions(r1.index, common)
    buckets: dict[tuple, list[tuple]] = {}
    for row in r0.rows:
        buckets.setdefault(tuple(row[p] for p in c0), []).append(row)
    # each output index is read from r0 when present there, otherwise from r1
    pick = [(0, r0.index.index(i)) if i in r0.index else (1, r1.index.index(i)) for i in out_index]
    rows = set()
    for row1 in r1.rows:
        for row0 in buckets.get(tuple(row1[p] for p in c1), ()):
            src = (row0, row1)
            rows.add(tuple(src[s][p] for s, p in pick))
    return Relation._trusted(out_index, r0.universe, frozenset(rows))


def complement(r: Relation) -> Relation:
    full = full_relation(r.index, r.universe)
    return Relation._trusted(r.index, r.universe, full.rows - r.rows)


def union(r0: Relation, r1: Relation) -> Relation:
    _same_type(r0, r1)
    return Relation._trusted(r0.index, r0.universe, r0.rows | r1.rows)


def intersection(r0: Relation, r1: Relation) -> Relation:
    _same_type(r0, r1)
    return Relation._trusted(r0.index, r0.universe, r0.rows & r1.rows)


def difference(r0: Relation, r1: Relation) -> Relation:
    _same_type(r0, r1)
    return Relation._trusted(r0.index, r0.universe, r0.rows - r1.rows)


def cylindrify(r: Relation, extra: Iterable[Index]) -> Relation:
    """Extend ``r`` with new indices that range freely over the universe."""
    extra = sort_indices(extra)
    overlap = set(extra) & set(r.index)
    if overlap:
        raise IndexSetOverlap(f"indices {sorted(map(str, overlap))} already present")
    if not extra:
        return r
    return join(r, full_relation(extra, r.universe))
