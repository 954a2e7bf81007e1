"""Permutation-invariant equivalence relations on concepts, stored as sets of pair types.

A relation holds of ``(X, Y)`` iff ``pair_type(X, Y)`` is one of its types, so
invariance under simultaneous permutation is built into the representation.
Reflexivity and symmetry are type-level checks; transitivity is checked
semantically at the relation's universe size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Optional

import numpy as np

from .universe import (
    Concept,
    PairType,
    UniverseError,
    orbit_types,
    pair_type,
    slice_masks,
    type_index,
    type_matrix,
)

ENUMERATE_CAP = 4
SAMPLE_CAP = 8


class RelationError(ValueError):
    pass


class CapabilityError(RuntimeError):
    """Requested search is beyond the configured size cap."""


@dataclass(frozen=True, eq=False)
class InvariantRelation:
    n: int
    yes_types: frozenset[PairType]
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        types = frozenset(PairType(*t) for t in self.yes_types)
        for t in types:
            if t.n != self.n or min(t) < 0:
                raise RelationError(f"type {tuple(t)} does not describe a pair over n={self.n}")
        object.__setattr__(self, "yes_types", types)

    def __eq__(self, other):
        if not isinstance(other, InvariantRelation):
            return NotImplemented
        return self.n == other.n and self.yes_types == other.yes_types

    def __hash__(self):
        return hash((self.n, self.yes_types))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<InvariantRelation{label} n={self.n} |types|={len(self.yes_types)}>"

    @cached_property
    def key(self) -> tuple[int, ...]:
        """Sorted type indices; the canonical sort key."""
        idx = type_index(self.n)
        return tuple(sorted(idx[t] for t in self.yes_types))

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(len(orbit_types(self.n)), dtype=bool)
        m[list(self.key)] = True
        m.setflags(write=False)
        return m

    @cached_property
    def matrix(self) -> np.ndarray:
        """Boolean ``R[X, Y]`` over all concept bitmasks."""
        return self.mask[type_matrix(self.n)]

    @cached_property
    def labels(self) -> np.ndarray:
        """Canonical (minimum-bitmask) member of each concept's class.

        Assumes the relation is a valid equivalence.
        """
        return np.argmax(self.matrix, axis=1)

    @cached_property
    def class_count(self) -> int:
        lab = self.labels
        return int(np.count_nonzero(lab == np.arange(lab.size)))

    def holds(self, X: Concept, Y: Concept) -> bool:
        if X.n != self.n or Y.n != self.n:
            raise UniverseError(f"concepts over n={X.n},{Y.n} for relation over n={self.n}")
        return pair_type(X, Y) in self.yes_types

    def with_name(self, name: str) -> "InvariantRelation":
        return InvariantRelation(self.n, self.yes_types, name)

    def serialize(self) -> str:
        ts = sorted(self.yes_types)
        return "".join(f"{t.a} {t.b} {t.c} {t.d}\n" for t in ts)

    @classmethod
    def parse(cls, text: str, name: Optional[str] = None) -> "InvariantRelation":
        types = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise RelationError(f"expected four counts per line, got {line!r}")
            types.append(PairType(*map(int, parts)))
        if not types:
            raise RelationError("empty relation file")
        n = types[0].n
        return cls(n, frozenset(types), name)


def holds(E: InvariantRelation, X: Concept, Y: Concept) -> bool:
    return E.holds(X, Y)


@dataclass(frozen=True)
class ValidationReport:
    reflexive: bool
    symmetric: bool
    transitive: bool
    counterexample: Optional[tuple[Concept, Concept, Concept]] = None
    missing_diagonal: tuple[PairType, ...] = ()
    asymmetric: tuple[PairType, ...] = ()

    @property
    def ok(self) -> bool:
        return self.reflexive and self.symmetric and self.transitive

    def describe(self) -> str:
        parts = []
        if not self.reflexive:
            parts.append("not reflexive: missing " + ", ".join(map(str, self.missing_diagonal)))
        if not self.symmetric:
            parts.append("not symmetric: no swap partner for " + ", ".join(map(str, self.asymmetric)))
        if not self.transitive and self.counterexample:
            X, Y, Z = self.counterexample
            parts.append(f"not transitive: E({X},{Y}) and E({Y},{Z}) but not E({X},{Z})")
        return "; ".join(parts) or "valid"


def _transitivity_witness(n: int, R: np.ndarray) -> Optional[tuple[int, int, int]]:
    # one canonical X per slice suffices: every triple is a permuted copy of one
    # whose first member is {0..k-1}
    for k in range(n + 1):
        x = (1 << k) - 1
        row = R[x]
        members = np.flatnonzero(row)
        bad = R[members] & ~row
        if bad.any():
            i, z = np.argwhere(bad)[0]
            return x, int(members[i]), int(z)
    return None


def validate(candidate: Iterable[PairType], n: int) -> ValidationReport:
    types = frozenset(PairType(*t) for t in candidate)
    for t in types:
        if t.n != n:
            raise RelationError(f"type {tuple(t)} does not sum to n={n}")
    diag = [t for t in orbit_types(n) if t.diagonal]
    missing = tuple(t for t in diag if t not in types)
    asym = tuple(sorted(t for t in types if t.swapped() not in types))
    w = _transitivity_witness(n, InvariantRelation(n, types).matrix)
    witness = None if w is None else tuple(Concept(b, n) for b in w)
    return ValidationReport(not missing, not asym, w is None, witness, missing, asym)


def is_valid(E: InvariantRelation) -> bool:
    return validate(E.yes_types, E.n).ok


def closure(n: int, types: Iterable[PairType]) -> frozenset[PairType]:
    """Smallest invariant equivalence relation containing the given types.

    Connected components of an invariant graph form an invariant partition,
    so one pass of component labelling is enough.
    """
    ots = orbit_types(n)
    idx = type_index(n)
    mask = np.zeros(len(ots), dtype=bool)
    for t in types:
        t = PairType(*t)
        mask[idx[t]] = mask[idx[t.swapped()]] = True
    T = type_matrix(n)
    lab = component_labels(mask[T])
    reps = np.array([(1 << k) - 1 for k in range(n + 1)])
    same = lab[reps][:, None] == lab[None, :]
    present = np.unique(T[reps][same])
    return frozenset(ots[i] for i in present)


def component_labels(R: np.ndarray) -> np.ndarray:
    """Minimum member of each concept's connected component in the graph R."""
    big = R.shape[0]
    idx = np.arange(big)
    lab = np.where(R, idx[None, :], big).min(axis=1)
    while True:
        nxt = np.where(R, lab[None, :], big).min(axis=1)
        nxt = np.minimum(nxt, lab)
        if np.array_equal(nxt, lab):
            return lab
        lab = nxt


def swap_groups(n: int) -> list[tuple[PairType, ...]]:
    """Non-diagonal types grouped into {t, t.swapped()} orbits, in orbit_types order."""
    seen, out = set(), []
    for t in orbit_types(n):
        if t.diagonal or t in seen:
            continue
        g = tuple(sorted({t, t.swapped()}, reverse=True))
        seen.update(g)
        out.append(g)
    return out


def diagonal_types(n: int) -> frozenset[PairType]:
    return frozenset(t for t in orbit_types(n) if t.diagonal)


def _batched_transitive(n: int, masks: np.ndarray) -> np.ndarray:
    """Vectorized triple scan for a stack of reflexive, symmetric type masks."""
    T = type_matrix(n)
    ok = np.ones(len(masks), dtype=bool)
    for k in range(n + 1):
        x = (1 << k) - 1
        Rx = masks[:, T[x]]  # (C, 2^n): E(X, Y)
        RY = masks[:, T]  # (C, 2^n, 2^n): E(Y, Z)
        bad = Rx[:, :, None] & RY & ~Rx[:, None, :]
        ok &= ~bad.any(axis=(1, 2))
    return ok


def enumerate_all(n: int, *, unsafe: bool = False, chunk: int = 4096) -> Iterator[InvariantRelation]:
    """Every invariant equivalence relation at n, exactly once, sorted by type key.

    Iterates all subsets of swap groups on top of the diagonal and keeps the
    transitive ones.  Capped at n <= 4 unless ``unsafe``.
    """
    if n > ENUMERATE_CAP and not unsafe:
        raise CapabilityError(f"exhaustive enumeration is capped at n={ENUMERATE_CAP}; use sample()")
    idx = type_index(n)
    groups = swap_groups(n)
    ntypes = len(orbit_types(n))
    base = np.zeros(ntypes, dtype=bool)
    for t in diagonal_types(n):
        base[idx[t]] = True
    gidx = [[idx[t] for t in g] for g in groups]
    total = 1 << len(groups)
    found = []
    for start in range(0, total, chunk):
        subsets = np.arange(start, min(start + chunk, total), dtype=np.int64)
        masks = np.repeat(base[None, :], len(subsets), axis=0)
        for j, gi in enumerate(gidx):
            on = (subsets >> j) & 1 == 1
            for i in gi:
                masks[on, i] = True
        keep = _batched_transitive(n, masks)
        for m in masks[keep]:
            found.append(tuple(np.flatnonzero(m)))
    ots = orbit_types(n)
    for key in sorted(found):
        yield InvariantRelation(n, frozenset(ots[i] for i in key))


def enumerate_by_closure(n: int) -> list[InvariantRelation]:
    """All invariant equivalence relations via closure search over the lattice.

    Every relation is the closure of identity plus its own swap groups, added one
    at a time, so a search from the identity reaches all of them.
    """
    groups = swap_groups(n)
    start = closure(n, diagonal_types(n))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for S in frontier:
            for g in groups:
                if g[0] in S:
                    continue
                C = closure(n, S | set(g))
                if C not in seen:
                    seen.add(C)
                    nxt.append(C)
        frontier = nxt
    rels = [InvariantRelation(n, S) for S in seen]
    return sorted(rels, key=lambda E: E.key)


def sample(n: int, seed: int, count: int, *, max_generators: int = 3) -> list[InvariantRelation]:
    """Pseudo-random valid relations: closures of a few random generator types.

    Deterministic for a fixed seed.  Duplicates are kept; see ``duplicate_flags``.
    """
    if n > SAMPLE_CAP:
        raise CapabilityError(f"sampling is capped at n={SAMPLE_CAP}")
    rng = np.random.default_rng(seed)
    groups = swap_groups(n)
    diag = diagonal_types(n)
    out = []
    cache: dict[frozenset, frozenset] = {}
    for _ in range(count):
        if not groups:
            out.append(InvariantRelation(n, diag))
            continue
        g = int(rng.integers(0, max_generators + 1))
        picks = sorted(set(int(i) for i in rng.choice(len(groups), size=g, replace=True))) if g else []
        gens = frozenset(t for i in picks for t in groups[i])
        if gens not in cache:
            cache[gens] = closure(n, diag | gens)
        out.append(InvariantRelation(n, cache[gens]))
    return out


def duplicate_flags(relations: list[InvariantRelation]) -> list[bool]:
    """True where a relation already appeared earlier in the list."""
    seen, flags = set(), []
    for E in relations:
        flags.append(E in seen)
        seen.add(E)
    return flags


def refines(E1: InvariantRelation, E2: InvariantRelation) -> bool:
    if E1.n != E2.n:
        raise UniverseError("relations over different universe sizes")
    return E1.yes_types <= E2.yes_types


def dualize(E: InvariantRelation) -> InvariantRelation:
    """E^c(X, Y) iff E(M-X, M-Y)."""
    name = f"{E.name}^c" if E.name else None
    return InvariantRelation(E.n, frozenset(t.dual() for t in E.yes_types), name)


def from_predicate(n: int, pred, name: Optional[str] = None) -> InvariantRelation:
    return InvariantRelation(n, frozenset(t for t in orbit_types(n) if pred(t)), name)


# Finite renderings of the named principles.  An "omega" bound is always
# satisfied by a finite count, so NP collapses to the total relation.  The CP
# display reads "|M=Y|"; it is taken to mean |M-Y|.
def _blv(t, n):
    return t.sd == 0


def _hp(t, n):
    return t.x == t.y


def _bp(t, n):
    return t.x == t.y and n - t.x == n - t.y


def _np(t, n):
    return True


def _lcp(t, n):
    return t.sd == 0 or t.csd == 0


def _cp(t, n):
    paired = t.x == t.y == n - t.x and (t.sd == 0 or t.csd == 0)
    junk = t.x != n - t.x and t.y != n - t.y
    return paired or junk


def _newv(t, n):
    return (t.x == t.y == n) or (t.x < n and t.y < n and t.sd == 0)


def _total(t, n):
    return True


_PREDICATES = {
    "BLV": _blv,
    "HP": _hp,
    "BP": _bp,
    "NP": _np,
    "LCP": _lcp,
    "CP": _cp,
    "NewV": _newv,
    "TOTAL": _total,
}

CATALOG_NAMES = ("BLV", "HP", "BP", "NP", "LCP", "CP", "NewV", "E0", "TOTAL")

# DSL renderings of the catalog, used by the CLI and cross-checked in tests
CATALOG_DSL = {
    "BLV": "sd = 0",
    "HP": "x = y",
    "BP": "x = y and c + d = b + d",
    "NP": "sd < omega",
    "LCP": "sd = 0 or csd = 0",
    "CP": "(x = y and x + x = n and (sd = 0 or csd = 0)) or (x + x != n and y + y != n)",
    "NewV": "(x = n and y = n) or (x < n and y < n and sd = 0)",
    "TOTAL": "n = n",
}


@lru_cache(maxsize=None)
def catalog(name: str, n: int) -> InvariantRelation:
    if name == "E0":
        from .abstraction import basal

        return basal(n)
    if name not in _PREDICATES:
        raise RelationError(f"unknown catalog relation {name!r}; known: {', '.join(CATALOG_NAMES)}")
    pred = _PREDICATES[name]
    return from_predicate(n, lambda t: pred(t, n), name)


def slice_mask_array(n: int, k: int) -> np.ndarray:
    return np.array(slice_masks(n, k), dtype=np.int64)


LATTICE_CAP = 6


@lru_cache(maxsize=None)
def lattice(n: int) -> tuple[InvariantRelation, ...]:
    """Every invariant equivalence relation at n (n <= 6), sorted by type key.

    Uses the subset filter up to the enumeration cap and the closure search
    beyond it; n=6 takes several seconds and is cached.
    """
    if n > LATTICE_CAP:
        raise CapabilityError(f"full relation lattice is only built for n <= {LATTICE_CAP}")
    if n <= ENUMERATE_CAP:
        return tuple(enumerate_all(n))
    return tuple(enumerate_by_closure(n))
