"""Bitset concepts over a finite universe, pair types, and permutations.

A concept is a subset of ``{0, ..., n-1}`` stored as an int bitmask.  The
orbit of a pair of concepts under the symmetric group is determined by the
four region counts ``(a, b, c, d)``; that quadruple is the pair type.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

MAX_N = 16


class UniverseError(ValueError):
    """Raised on malformed concepts, permutations or mismatched universes."""


@dataclass(frozen=True)
class Universe:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not 1 <= self.n <= MAX_N:
            raise UniverseError(f"universe size must be in 1..{MAX_N}, got {self.n!r}")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def concept(self, elements: Iterable[int] = ()) -> "Concept":
        return Concept.of(self.n, elements)

    def concepts(self) -> Iterator["Concept"]:
        for bits in range(1 << self.n):
            yield Concept(bits, self.n)

    def slice(self, k: int) -> list["Concept"]:
        """All size-k concepts in increasing bitmask order."""
        if not 0 <= k <= self.n:
            raise UniverseError(f"slice size {k} out of range for n={self.n}")
        return [Concept(b, self.n) for b in slice_masks(self.n, k)]


@dataclass(frozen=True, order=True)
class Concept:
    bits: int
    n: int

    def __post_init__(self):
        Universe(self.n)
        if self.bits < 0 or self.bits >> self.n:
            raise UniverseError(f"bits {self.bits:#x} exceed universe of size {self.n}")

    @classmethod
    def of(cls, n: int, elements: Iterable[int]) -> "Concept":
        bits = 0
        for e in elements:
            if not 0 <= e < n:
                raise UniverseError(f"element {e} outside universe of size {n}")
            bits |= 1 << e
        return cls(bits, n)

    @property
    def universe(self) -> Universe:
        return Universe(self.n)

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.bits >> i & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, e: int) -> bool:
        return 0 <= e < self.n and bool(self.bits >> e & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def _check(self, other: "Concept") -> None:
        if not isinstance(other, Concept) or other.n != self.n:
            raise UniverseError("concepts live in different universes")

    def complement(self) -> "Concept":
        return Concept(self.bits ^ ((1 << self.n) - 1), self.n)

    def __and__(self, other: "Concept") -> "Concept":
        self._check(other)
        return Concept(self.bits & other.bits, self.n)

    def __or__(self, other: "Concept") -> "Concept":
        self._check(other)
        return Concept(self.bits | other.bits, self.n)

    def __sub__(self, other: "Concept") -> "Concept":
        self._check(other)
        return Concept(self.bits & ~other.bits, self.n)

    def __xor__(self, other: "Concept") -> "Concept":
        self._check(other)
        return Concept(self.bits ^ other.bits, self.n)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.elements)) + "}"


class PairType(NamedTuple):
    """Region counts of a concept pair: |X&Y|, |X-Y|, |Y-X|, |M-(X|Y)|."""

    a: int
    b: int
    c: int
    d: int

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    @property
    def x(self) -> int:
        return self.a + self.b

    @property
    def y(self) -> int:
        return self.a + self.c

    @property
    def sd(self) -> int:
        return self.b + self.c

    @property
    def csd(self) -> int:
        return self.a + self.d

    @property
    def diagonal(self) -> bool:
        return self.b == 0 and self.c == 0

    def swapped(self) -> "PairType":
        """Type of (Y, X)."""
        return PairType(self.a, self.c, self.b, self.d)

    def dual(self) -> "PairType":
        """Type of (M-X, M-Y)."""
        return PairType(self.d, self.c, self.b, self.a)

    def __str__(self) -> str:
        return f"{self.a} {self.b} {self.c} {self.d}"


def pair_type(X: Concept, Y: Concept) -> PairType:
    X._check(Y)
    a = (X.bits & Y.bits).bit_count()
    b = (X.bits & ~Y.bits).bit_count()
    c = (Y.bits & ~X.bits).bit_count()
    return PairType(a, b, c, X.n - a - b - c)


def bicardinal(X: Concept, Y: Concept) -> bool:
    X._check(Y)
    # |M-X| = n-|X| is determined by |X| in a finite universe
    return len(X) == len(Y) and len(X.complement()) == len(Y.complement())


@lru_cache(maxsize=None)
def orbit_types(n: int) -> tuple[PairType, ...]:
    """Every quadruple summing to n, once each, in descending lexicographic order."""
    Universe(n)
    out = [
        PairType(a, b, c, n - a - b - c)
        for a in range(n, -1, -1)
        for b in range(n - a, -1, -1)
        for c in range(n - a - b, -1, -1)
    ]
    return tuple(out)


@lru_cache(maxsize=None)
def type_index(n: int) -> Mapping[PairType, int]:
    return {t: i for i, t in enumerate(orbit_types(n))}


def slice_masks(n: int, k: int) -> list[int]:
    return sorted(sum(1 << i for i in c) for c in combinations(range(n), k))


@lru_cache(maxsize=12)
def popcounts(n: int) -> np.ndarray:
    m = np.arange(1 << n, dtype=np.int64)
    out = np.zeros_like(m)
    for i in range(n):
        out += (m >> i) & 1
    return out


@lru_cache(maxsize=10)
def type_matrix(n: int) -> np.ndarray:
    """``T[X, Y]`` = index into ``orbit_types(n)`` of ``pair_type(X, Y)``.

    Shape ``(2**n, 2**n)``; only built for n <= 10 (memory).
    """
    if n > 10:
        raise UniverseError(f"type matrix for n={n} is too large")
    pc = popcounts(n)
    m = np.arange(1 << n, dtype=np.int64)
    a = pc[m[:, None] & m[None, :]]
    b = pc[m[:, None] & ~m[None, :] & ((1 << n) - 1)]
    c = pc[m[None, :] & ~m[:, None] & ((1 << n) - 1)]
    lookup = np.full((n + 1, n + 1, n + 1), -1, dtype=np.int32)
    for t, i in type_index(n).items():
        lookup[t.a, t.b, t.c] = i
    T = lookup[a, b, c].astype(np.int32)
    T.setflags(write=False)
    return T


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        Universe(n)
        if sorted(self.images) != list(range(n)):
            raise UniverseError(f"not a bijection of 0..{n - 1}: {self.images}")

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        img = list(range(n))
        for cyc in cycles:
            for i, x in enumerate(cyc):
                img[x] = cyc[(i + 1) % len(cyc)]
        return cls(tuple(img))

    def __call__(self, x: int) -> int:
        return self.images[x]

    def then(self, other: "Permutation") -> "Permutation":
        """Apply self first, then other."""
        if other.n != self.n:
            raise UniverseError("permutations on different universes")
        return Permutation(tuple(other.images[i] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def moved(self) -> frozenset[int]:
        return frozenset(i for i, j in enumerate(self.images) if i != j)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(self.n):
            if i in seen or self.images[i] == i:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        cs = self.cycles()
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cs) or "id"


def apply_permutation(p: Permutation, X: Concept) -> Concept:
    if p.n != X.n:
        raise UniverseError("permutation and concept on different universes")
    bits = 0
    for e in X.elements:
        bits |= 1 << p.images[e]
    return Concept(bits, X.n)


@dataclass(frozen=True)
class PartialInjection:
    """Injective map between disjoint subsets of the universe, as (x, f(x)) pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        dom = [x for x, _ in self.pairs]
        rng = [y for _, y in self.pairs]
        if len(set(dom)) != len(dom) or len(set(rng)) != len(rng):
            raise UniverseError("partial map is not injective")
        if set(dom) & set(rng):
            raise UniverseError("domain and range of the partial injection overlap")

    @classmethod
    def from_mapping(cls, f: Mapping[int, int]) -> "PartialInjection":
        return cls(tuple(sorted(f.items())))

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(x for x, _ in self.pairs)

    @property
    def range(self) -> frozenset[int]:
        return frozenset(y for _, y in self.pairs)

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)


def induced_permutation(f: PartialInjection, u: Universe | int) -> Permutation:
    """Swap each x in dom(f) with f(x); fix everything else."""
    n = u.n if isinstance(u, Universe) else Universe(u).n
    img = list(range(n))
    for x, y in f.pairs:
        if not (0 <= x < n and 0 <= y < n):
            raise UniverseError(f"partial injection leaves the universe of size {n}")
        img[x], img[y] = y, x
    return Permutation(tuple(img))


def witness_permutation(X: Concept, Y: Concept, X2: Concept, Y2: Concept) -> Permutation:
    """A permutation carrying (X, Y) onto (X2, Y2), built region by region.

    Raises if the pair types differ.
    """
    if pair_type(X, Y) != pair_type(X2, Y2):
        raise UniverseError("pairs lie in different orbits")
    n = X.n
    full = (1 << n) - 1
    src_regions = [X.bits & Y.bits, X.bits & ~Y.bits, Y.bits & ~X.bits, full & ~(X.bits | Y.bits)]
    dst_regions = [X2.bits & Y2.bits, X2.bits & ~Y2.bits, Y2.bits & ~X2.bits, full & ~(X2.bits | Y2.bits)]
    img = [0] * n
    for s, d in zip(src_regions, dst_regions):
        src = [i for i in range(n) if s >> i & 1]
        dst = [i for i in range(n) if d >> i & 1]
        for i, j in zip(src, dst):
            img[i] = j
    return Permutation(tuple(img))
