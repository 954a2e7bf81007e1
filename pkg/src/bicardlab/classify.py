"""Bicardinal slice partitions and the trivial/separative/complementative trichotomy.

At finite n the bicardinal class of a size-k concept is the whole k-slice, so
each slice of a relation is classified by how E partitions it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np

from .relations import InvariantRelation
from .universe import Concept, UniverseError, slice_masks

EXEMPT_NOTE = "degenerate overlap, exempt"


class Profile(str, Enum):
    TRIVIAL = "Trivial"
    PROPER_SEPARATION = "ProperSeparation"
    PROPER_COMPLEMENTATION = "ProperComplementation"
    VIOLATION = "Violation"


@dataclass(frozen=True)
class SlicePartition:
    n: int
    k: int
    blocks: tuple[tuple[int, ...], ...]

    def concepts(self) -> list[list[Concept]]:
        return [[Concept(b, self.n) for b in block] for block in self.blocks]

    def __str__(self) -> str:
        return " | ".join(" ".join(str(Concept(b, self.n)) for b in blk) for blk in self.blocks)


@dataclass(frozen=True)
class SliceProfile:
    k: int
    label: Profile
    trivial: bool
    separative: bool
    complementative: bool
    blocks: int
    note: Optional[str] = None

    @property
    def overlap(self) -> bool:
        """Trivial and also separative or complementative.

        Separative always implies complementative, so that pair is not an overlap.
        """
        return self.trivial and (self.separative or self.complementative)

    def as_dict(self) -> dict:
        d = {
            "k": self.k,
            "profile": self.label.value,
            "trivial": self.trivial,
            "separative": self.separative,
            "complementative": self.complementative,
            "blocks": self.blocks,
        }
        if self.note:
            d["note"] = self.note
        return d


@lru_cache(maxsize=None)
def _slice_array(n: int, k: int) -> np.ndarray:
    a = np.array(slice_masks(n, k), dtype=np.int64)
    a.setflags(write=False)
    return a


def _check(E: InvariantRelation, n: int, k: int) -> None:
    if E.n != n:
        raise UniverseError(f"relation is over n={E.n}, asked about n={n}")
    if not 0 <= k <= n:
        raise UniverseError(f"slice size {k} out of range for n={n}")


def _slice_stats(E: InvariantRelation, n: int, k: int):
    masks = _slice_array(n, k)
    lab = E.labels[masks]
    uniq, inv, counts = np.unique(lab, return_inverse=True, return_counts=True)
    per = counts[inv]
    comp_lab = E.labels[((1 << n) - 1) ^ masks]
    paired = (per == 2) & (comp_lab == lab)
    return masks, lab, len(uniq), per, paired


def slice_classes(E: InvariantRelation, n: int, k: int) -> SlicePartition:
    """E-classes of the size-k concepts, each block ascending, blocks by first member."""
    _check(E, n, k)
    masks = _slice_array(n, k)
    lab = E.labels[masks]
    groups: dict[int, list[int]] = {}
    for m, l in zip(masks.tolist(), lab.tolist()):
        groups.setdefault(l, []).append(m)
    blocks = sorted(tuple(g) for g in groups.values())
    return SlicePartition(n, k, tuple(blocks))


def classify_slice(E: InvariantRelation, n: int, k: int) -> SliceProfile:
    _check(E, n, k)
    _, _, nblocks, per, paired = _slice_stats(E, n, k)
    trivial = nblocks == 1
    separative = bool(np.all(per == 1))
    complementative = bool(np.all((per == 1) | paired))
    if trivial:
        label = Profile.TRIVIAL
    elif separative:
        label = Profile.PROPER_SEPARATION
    elif complementative:
        label = Profile.PROPER_COMPLEMENTATION
    else:
        label = Profile.VIOLATION
    note = None
    if trivial and (separative or complementative) and (k in (0, n) or n <= 2):
        note = EXEMPT_NOTE
    return SliceProfile(k, label, trivial, separative, complementative, nblocks, note)


def profiles(E: InvariantRelation, n: int) -> tuple[SliceProfile, ...]:
    return tuple(classify_slice(E, n, k) for k in range(n + 1))


@dataclass(frozen=True)
class TrichotomyReport:
    n: int
    profiles: tuple[SliceProfile, ...]
    violations: tuple[int, ...]
    overlaps: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def trichotomy_check(E: InvariantRelation, n: int) -> TrichotomyReport:
    """Every slice has a flag; overlapping flags only where they are degenerate."""
    profs = profiles(E, n)
    bad, overlaps = [], []
    for p in profs:
        if p.label is Profile.VIOLATION:
            bad.append(p.k)
        elif p.overlap:
            if p.note == EXEMPT_NOTE:
                overlaps.append(p.k)
            else:
                bad.append(p.k)
    return TrichotomyReport(n, profs, tuple(bad), tuple(overlaps))


@dataclass(frozen=True)
class TightnessReport:
    n: int
    violations: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_tightness(E: InvariantRelation, n: int) -> TightnessReport:
    """Nontrivial slices must be exactly all singletons or exactly all complement pairs."""
    bad = []
    for k in range(n + 1):
        _check(E, n, k)
        _, _, nblocks, per, paired = _slice_stats(E, n, k)
        if nblocks == 1:
            continue
        if not (np.all(per == 1) or np.all(paired)):
            bad.append(k)
    return TightnessReport(n, tuple(bad))
