"""Relative categoricity by brute force: induced models, isomorphism search, coarsening tests.

An operator for E is an injection from E's classes into [n].  Its induced
model is the carrier rng(op) with op restricted to subsets of the carrier.
E is relatively categorical at n when any two operators induce isomorphic
models.  Isomorphism is an equivalence, so it suffices to compare every
operator with the first one.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice, permutations
from typing import Iterator, Optional

import numpy as np

from .abstraction import AbstractionOperator, class_count, operator_from_assignment
from .relations import InvariantRelation
from .universe import UniverseError, orbit_types


@dataclass(frozen=True)
class InducedModel:
    n: int
    carrier: tuple[int, ...]
    subsets: np.ndarray  # bitmasks of every subset of the carrier, ascending
    values: np.ndarray  # operator value at each subset

    @property
    def size(self) -> int:
        return len(self.carrier)

    def fibers(self) -> dict[int, int]:
        """How many carrier subsets each carrier element abstracts."""
        out = {e: 0 for e in self.carrier}
        for v in self.values.tolist():
            if v in out:
                out[v] += 1
        return out


@dataclass(frozen=True)
class IsoWitness:
    gamma: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.gamma)

    def __str__(self) -> str:
        return " ".join(f"{a}->{b}" for a, b in self.gamma)


def _submasks(mask: int) -> np.ndarray:
    subs, s = [], mask
    while True:
        subs.append(s)
        if s == 0:
            break
        s = (s - 1) & mask
    return np.array(sorted(subs), dtype=np.int64)


def induced_model(op: AbstractionOperator, n: Optional[int] = None) -> InducedModel:
    if n is not None and n != op.n:
        raise UniverseError(f"operator is over n={op.n}, asked about n={n}")
    carrier = tuple(sorted(op.range))
    mask = sum(1 << e for e in carrier)
    subs = _submasks(mask)
    vals = np.asarray(op.images, dtype=np.int64)[subs]
    return InducedModel(op.n, carrier, subs, vals)


def _map_subsets(subsets: np.ndarray, gamma: dict[int, int]) -> np.ndarray:
    out = np.zeros_like(subsets)
    for a, b in gamma.items():
        out |= ((subsets >> a) & 1) << b
    return out


def satisfies_isomcond(m1: InducedModel, m2: InducedModel, gamma: dict[int, int]) -> bool:
    """Γ(∂₁X) = ∂₂(ΓX) for every subset X of the first carrier."""
    lut = np.full(max(m1.n, m2.n), -1, dtype=np.int64)
    for a, b in gamma.items():
        lut[a] = b
    v1 = m1.values
    if np.any(lut[v1] < 0):
        return False
    images = _map_subsets(m1.subsets, gamma)
    full2 = np.full(1 << m2.n, -1, dtype=np.int64)
    full2[m2.subsets] = m2.values
    return bool(np.array_equal(lut[v1], full2[images]))


def find_isomorphism(m1: InducedModel, m2: InducedModel) -> Optional[IsoWitness]:
    """First bijection (lexicographic in the second carrier) meeting the isomorphism condition.

    Candidates for each element are pruned by fiber size, which any isomorphism preserves.
    """
    if m1.size != m2.size:
        return None
    f1, f2 = m1.fibers(), m2.fibers()
    if sorted(f1.values()) != sorted(f2.values()):
        return None
    cands = [[b for b in m2.carrier if f2[b] == f1[a]] for a in m1.carrier]
    chosen: dict[int, int] = {}
    used: set[int] = set()

    def search(i: int) -> Optional[dict[int, int]]:
        if i == len(m1.carrier):
            return dict(chosen) if satisfies_isomcond(m1, m2, chosen) else None
        a = m1.carrier[i]
        for b in cands[i]:
            if b in used:
                continue
            chosen[a] = b
            used.add(b)
            hit = search(i + 1)
            used.discard(b)
            del chosen[a]
            if hit is not None:
                return hit
        return None

    hit = search(0)
    return None if hit is None else IsoWitness(tuple(sorted(hit.items())))


class KernelMismatch(ValueError):
    pass


@dataclass(frozen=True)
class NaturalVerdict:
    isomorphism: bool
    gamma: IsoWitness
    failure: Optional[int] = None  # a carrier subset where the condition fails


def natural_bijection_check(
    E: InvariantRelation, op1: AbstractionOperator, op2: AbstractionOperator, n: Optional[int] = None
) -> NaturalVerdict:
    """Is Γ(∂₁X) = ∂₂X an isomorphism of the induced models?"""
    if not (op1.has_kernel(E) and op2.has_kernel(E)):
        raise KernelMismatch("both operators must have kernel exactly E")
    gamma = {}
    for a, b in zip(op1.images, op2.images):
        gamma.setdefault(a, b)
    m1, m2 = induced_model(op1, n), induced_model(op2, n)
    wit = IsoWitness(tuple(sorted(gamma.items())))
    if satisfies_isomcond(m1, m2, gamma):
        return NaturalVerdict(True, wit)
    lut = np.array([gamma.get(i, -1) for i in range(E.n)])
    images = _map_subsets(m1.subsets, gamma)
    bad = np.flatnonzero(lut[m1.values] != np.asarray(op2.images)[images])
    return NaturalVerdict(False, wit, int(m1.subsets[bad[0]]))


def ccoa(E: InvariantRelation, n: Optional[int] = None) -> bool:
    """Equinumerous concepts of size at most the number of abstracts are E-related."""
    c = class_count(E, n)
    return all(t in E.yes_types for t in _equinumerous_types(E.n) if t.x <= c)


def bicard_ccoa(E: InvariantRelation, n: Optional[int] = None) -> bool:
    """Every bicardinally equivalent pair is E-related."""
    if n is not None and n != E.n:
        raise UniverseError(f"relation is over n={E.n}, asked about n={n}")
    return all(t in E.yes_types for t in _equinumerous_types(E.n))


def _equinumerous_types(n: int):
    return [t for t in orbit_types(n) if t.x == t.y]


def operators(E: InvariantRelation) -> Iterator[AbstractionOperator]:
    """Every operator with kernel E, in lexicographic order of class images."""
    c = E.class_count
    for values in permutations(range(E.n), c):
        yield operator_from_assignment(E, values)


def operator_count(E: InvariantRelation) -> int:
    c, n = E.class_count, E.n
    out = 1
    for i in range(c):
        out *= n - i
    return out


def random_operators(E: InvariantRelation, count: int, seed: int) -> list[AbstractionOperator]:
    rng = np.random.default_rng(seed)
    c = E.class_count
    return [operator_from_assignment(E, rng.permutation(E.n)[:c].tolist()) for _ in range(count)]


EXHAUSTIVE_CLASSES = 4
EXHAUSTIVE_N = 4


@dataclass(frozen=True)
class RelcatReport:
    n: int
    class_count: int
    satisfiable: bool
    operators: int = 0
    exhaustive: bool = False
    rc: Optional[bool] = None
    natural_rc: Optional[bool] = None
    ccoa: Optional[bool] = None
    bicard_ccoa: Optional[bool] = None
    surjective_rc: Optional[bool] = None
    witness: Optional[tuple[str, str]] = None

    @property
    def agrees(self) -> Optional[bool]:
        """RC verdict matches cardinality coarsening."""
        return None if self.rc is None else self.rc == self.ccoa

    @property
    def agrees_bicard(self) -> Optional[bool]:
        """Among surjective operators, all-isomorphic matches bicardinality coarsening."""
        return None if self.surjective_rc is None else self.surjective_rc == self.bicard_ccoa

    @property
    def consistent(self) -> bool:
        checks = [self.agrees, self.agrees_bicard]
        if self.natural_rc and self.rc is False:
            checks.append(False)
        return all(c is not False for c in checks)

    def as_dict(self) -> dict:
        d = {
            "class_count": self.class_count,
            "satisfiable": self.satisfiable,
            "operators": self.operators,
            "exhaustive": self.exhaustive,
            "rc": self.rc,
            "natural_rc": self.natural_rc,
            "ccoa": self.ccoa,
            "bicard_ccoa": self.bicard_ccoa,
            "surjective_rc": self.surjective_rc,
            "agrees": self.agrees,
            "agrees_bicard": self.agrees_bicard,
        }
        if self.witness:
            d["witness"] = list(self.witness)
        return d


def relcat_verdict(
    E: InvariantRelation, n: Optional[int] = None, budget: Optional[int] = None, seed: int = 0
) -> RelcatReport:
    """Compare every operator for E with the first; RC iff all induced models are isomorphic."""
    c = class_count(E, n)
    n = E.n
    if c > n:
        return RelcatReport(n, c, False)
    exhaustive = budget is None and c <= EXHAUSTIVE_CLASSES and n <= EXHAUSTIVE_N
    if budget is None and not exhaustive:
        budget = 200
    if exhaustive:
        ops = list(operators(E))
    else:
        ops = [next(operators(E))] + random_operators(E, budget, seed)
    base = ops[0]
    m0 = induced_model(base)
    rc, natural, witness = True, True, None
    for op in islice(ops, 1, None):
        if find_isomorphism(m0, induced_model(op)) is None:
            rc = False
            if witness is None:
                witness = (base.serialize(), op.serialize())
        if natural and not natural_bijection_check(E, base, op).isomorphism:
            natural = False
        if not rc and not natural:
            break
    surjective = rc if c == n else None
    return RelcatReport(
        n, c, True, len(ops), exhaustive, rc, natural, ccoa(E), bicard_ccoa(E), surjective, witness
    )
