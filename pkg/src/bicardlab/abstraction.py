"""Abstraction operators and the satisfiability of abstraction principles at finite n.

An operator with kernel exactly E exists iff E has at most n classes.  Restricted
principles ask for an invariant relation with at most n classes that agrees with
E on a region of the powerset.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np

from .classify import Profile, classify_slice
from .relations import (
    LATTICE_CAP,
    InvariantRelation,
    closure,
    diagonal_types,
    from_predicate,
    lattice,
    refines,
    sample,
    swap_groups,
)
from .universe import Concept, UniverseError, orbit_types, popcounts


@dataclass(frozen=True)
class AbstractionOperator:
    """Total map from concept bitmasks to universe elements: ``images[X]``."""

    n: int
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != 1 << self.n:
            raise UniverseError(f"operator needs {1 << self.n} images, got {len(self.images)}")
        if any(not 0 <= v < self.n for v in self.images):
            raise UniverseError("operator value outside the universe")

    def __call__(self, X: Concept | int) -> int:
        return self.images[X.bits if isinstance(X, Concept) else X]

    @property
    def range(self) -> frozenset[int]:
        return frozenset(self.images)

    def kernel_matrix(self) -> np.ndarray:
        v = np.asarray(self.images)
        return v[:, None] == v[None, :]

    def has_kernel(self, E: InvariantRelation) -> bool:
        return E.n == self.n and bool(np.array_equal(self.kernel_matrix(), E.matrix))

    def serialize(self) -> str:
        return " ".join(map(str, self.images))


def class_representatives(E: InvariantRelation) -> np.ndarray:
    """Minimum member of each class, ascending."""
    lab = E.labels
    return np.flatnonzero(lab == np.arange(lab.size))


def class_count(E: InvariantRelation, n: Optional[int] = None) -> int:
    if n is not None and n != E.n:
        raise UniverseError(f"relation is over n={E.n}, asked about n={n}")
    return E.class_count


def operator_from_assignment(E: InvariantRelation, values: Sequence[int]) -> AbstractionOperator:
    """Send the i-th class (by minimum member) to ``values[i]``."""
    reps = class_representatives(E)
    if len(values) != len(reps):
        raise ValueError(f"need {len(reps)} values, got {len(values)}")
    pos = np.empty(1 << E.n, dtype=np.int64)
    pos[reps] = np.arange(len(reps))
    vals = np.asarray(values, dtype=np.int64)
    return AbstractionOperator(E.n, tuple(int(v) for v in vals[pos[E.labels]]))


@dataclass(frozen=True)
class SatReport:
    class_count: int
    satisfiable: bool
    witness: Optional[AbstractionOperator] = None
    extension: Optional[InvariantRelation] = None
    method: str = "count"

    def as_dict(self) -> dict:
        d = {"class_count": self.class_count, "satisfiable": self.satisfiable, "method": self.method}
        if self.witness is not None:
            d["witness"] = self.witness.serialize()
        if self.extension is not None:
            d["extension"] = [list(t) for t in sorted(self.extension.yes_types)]
        return d


def satisfiable(E: InvariantRelation, n: Optional[int] = None) -> SatReport:
    c = class_count(E, n)
    if c > E.n:
        return SatReport(c, False)
    return SatReport(c, True, operator_from_assignment(E, range(c)))


MODES = ("eq", "le")


def region_mask(n: int, k: int, mode: str) -> np.ndarray:
    """Types of pairs inside the restricted region: both sizes k, or both at most k."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if not 0 <= k <= n:
        raise UniverseError(f"slice size {k} out of range for n={n}")
    if mode == "eq":
        return np.array([t.x == k and t.y == k for t in orbit_types(n)])
    return np.array([t.x <= k and t.y <= k for t in orbit_types(n)])


def region_classes(E: InvariantRelation, k: int, mode: str) -> int:
    """Number of E-classes meeting the region; a lower bound for any agreeing relation."""
    pc = popcounts(E.n)
    inside = pc == k if mode == "eq" else pc <= k
    return int(np.unique(E.labels[inside]).size)


def _greedy_extension(E: InvariantRelation, region: np.ndarray) -> InvariantRelation:
    """Coarsen E outside the region one swap group at a time while the region is preserved."""
    n = E.n
    ots = orbit_types(n)
    current = frozenset(t for t, r in zip(ots, region) if r and t in E.yes_types) | diagonal_types(n)
    current = closure(n, current)
    target = E.mask & region
    for g in swap_groups(n):
        if g[0] in current:
            continue
        cand = closure(n, current | set(g))
        if np.array_equal(InvariantRelation(n, cand).mask & region, target):
            current = cand
    return InvariantRelation(n, current)


def restricted_satisfiable(E: InvariantRelation, n: int, k: int, mode: str) -> SatReport:
    """Is there an invariant relation with at most n classes agreeing with E on the region?

    A greedy coarsening settles most satisfiable cases, a class-count bound settles
    most unsatisfiable ones, and the full lattice decides the rest for n <= 6.
    """
    if E.n != n:
        raise UniverseError(f"relation is over n={E.n}, asked about n={n}")
    region = region_mask(n, k, mode)
    target = E.mask & region
    greedy = _greedy_extension(E, region)
    if greedy.class_count <= n:
        return SatReport(greedy.class_count, True, satisfiable(greedy).witness, greedy, "greedy")
    bound = region_classes(E, k, mode)
    if bound > n:
        return SatReport(bound, False, method="bound")
    if n > LATTICE_CAP:
        return SatReport(greedy.class_count, False, method="greedy-inconclusive")
    best = None
    for cand in lattice(n):
        if np.array_equal(cand.mask & region, target):
            if best is None or cand.class_count < best.class_count:
                best = cand
    assert best is not None  # E itself agrees
    if best.class_count <= n:
        return SatReport(best.class_count, True, satisfiable(best).witness, best, "exact")
    return SatReport(best.class_count, False, method="exact")


@dataclass(frozen=True)
class BCReport:
    n: int
    applicable: bool
    nontrivial: bool = False
    class_count: int = 0

    @property
    def confirmed(self) -> bool:
        return not (self.applicable and self.nontrivial) or self.class_count > self.n

    def as_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "nontrivial": self.nontrivial,
            "class_count": self.class_count,
            "confirmed": self.confirmed,
        }


def check_thm_bc(E: InvariantRelation, n: int) -> BCReport:
    """A nontrivial middle slice with k = n/2 > 2 forces more than n classes."""
    if n % 2 or n <= 4:
        return BCReport(n, False)
    prof = classify_slice(E, n, n // 2)
    return BCReport(n, True, prof.label is not Profile.TRIVIAL, class_count(E, n))


INDICATOR_FULL_CAP = 5


@dataclass(frozen=True)
class IndicatorVerdict:
    n: int
    indicator: bool
    checked: int
    exhaustive: bool
    counterexample: Optional[tuple[int, ...]] = None
    witnesses: tuple[tuple[tuple[int, ...], int, int], ...] = field(default=(), repr=False)


def _image_masks(f: np.ndarray, n: int) -> np.ndarray:
    """Bitmask images of every concept under each map in the stack ``f`` (shape (F, n))."""
    m = np.arange(1 << n, dtype=np.int64)
    out = np.zeros((f.shape[0], 1 << n), dtype=np.int64)
    for i in range(n):
        out |= ((m >> i) & 1)[None, :] << f[:, i : i + 1]
    return out


def _non_permutations(n: int) -> np.ndarray:
    maps = np.array(list(product(range(n), repeat=n)), dtype=np.int64).reshape(-1, n)
    bij = np.array([len(set(r)) == n for r in maps.tolist()])
    return maps[~bij]


def indicator_check(
    E: InvariantRelation, n: int, budget: Optional[int] = None, seed: int = 0, keep_witnesses: bool = False
) -> IndicatorVerdict:
    """Does every non-permutation f admit X, Y with E(fX, fY) but not E(X, Y)?

    Scans all n^n - n! maps up to n = 5, otherwise ``budget`` random ones.
    """
    if E.n != n:
        raise UniverseError(f"relation is over n={E.n}, asked about n={n}")
    exhaustive = n <= INDICATOR_FULL_CAP and budget is None
    if exhaustive:
        maps = _non_permutations(n)
    else:
        rng = np.random.default_rng(seed)
        draws = rng.integers(0, n, size=(budget or 10_000, n))
        keep = np.array([len(set(r)) < n for r in draws.tolist()])
        maps = draws[keep]
    R = E.matrix
    witnesses = []
    for start in range(0, len(maps), 256):
        chunk = maps[start : start + 256]
        img = _image_masks(chunk, n)
        for i, (f, im) in enumerate(zip(chunk, img)):
            bad = R[np.ix_(im, im)] & ~R
            if not bad.any():
                return IndicatorVerdict(n, False, start + i + 1, exhaustive, tuple(f.tolist()))
            if keep_witnesses:
                x, y = np.argwhere(bad)[0]
                witnesses.append((tuple(f.tolist()), int(x), int(y)))
    return IndicatorVerdict(n, True, len(maps), exhaustive, None, tuple(witnesses))


def indicator_witness(E: InvariantRelation, f: Sequence[int]) -> Optional[tuple[Concept, Concept]]:
    """First (X, Y) in bitmask order with E(fX, fY) and not E(X, Y)."""
    n = E.n
    im = _image_masks(np.asarray([f], dtype=np.int64), n)[0]
    R = E.matrix
    bad = R[np.ix_(im, im)] & ~R
    if not bad.any():
        return None
    x, y = np.argwhere(bad)[0]
    return Concept(int(x), n), Concept(int(y), n)


def expl_size(k: int, n: int) -> bool:
    return 2**k > n


def expl(X: Concept) -> bool:
    """Subconcepts outnumber the objects."""
    return expl_size(len(X), X.n)


def top_size(k: int, n: int) -> bool:
    return expl_size(k, n) and expl_size(n - k, n)


def top(X: Concept) -> bool:
    return top_size(len(X), X.n)


def top_slices(n: int) -> list[int]:
    return [k for k in range(n + 1) if top_size(k, n)]


def basal(n: int) -> InvariantRelation:
    """TOP concepts related by equinumerosity, everything else by identity."""
    return from_predicate(n, lambda t: t.sd == 0 or (t.x == t.y and top_size(t.x, n)), "E0")


@dataclass(frozen=True)
class TopReport:
    n: int
    satisfiable: bool
    top_slices: tuple[int, ...]
    exceptions: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.exceptions


def check_top_triviality(E: InvariantRelation, n: int) -> TopReport:
    """A satisfiable relation is trivial on every TOP slice."""
    tops = tuple(top_slices(n))
    sat = satisfiable(E, n).satisfiable
    bad = ()
    if sat:
        bad = tuple(k for k in tops if classify_slice(E, n, k).label is not Profile.TRIVIAL)
    return TopReport(n, sat, tops, bad)


@dataclass(frozen=True)
class FinerReport:
    n: int
    checked: int
    satisfiable: int
    violations: tuple[InvariantRelation, ...]
    exhaustive: bool
    trivial: bool

    @property
    def ok(self) -> bool:
        return not self.violations


def finer_than_all_satisfiable(
    n: int, relations: Optional[Iterable[InvariantRelation]] = None, *, sample_count: int = 2000, seed: int = 0
) -> FinerReport:
    """basal(n) refines every satisfiable relation.

    Uses the full lattice for n <= 6 unless relations are supplied.  When no TOP
    slice exists basal is the identity and the check is trivially true.
    """
    exhaustive = relations is None and n <= LATTICE_CAP
    if relations is None:
        relations = lattice(n) if exhaustive else sample(n, seed, sample_count)
    E0 = basal(n)
    seen, checked, sat, bad = set(), 0, 0, []
    for E in relations:
        if E in seen:
            continue
        seen.add(E)
        checked += 1
        if E.class_count <= n:
            sat += 1
            if not refines(E0, E):
                bad.append(E)
    return FinerReport(n, checked, sat, tuple(bad), exhaustive, not top_slices(n))


def more2_holds(x: int, y: int) -> bool:
    """|X u Y| < |X x Y| for disjoint X, Y with |X| > 2 and |Y| >= 2."""
    return x + y < x * y


def more2_check(max_total: int = 16) -> list[tuple[int, int]]:
    """Size pairs up to ``max_total`` elements where the inequality fails (expected none)."""
    return [(x, y) for x in range(3, max_total + 1) for y in range(2, max_total + 1 - x) if not more2_holds(x, y)]
