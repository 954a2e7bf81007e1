"""Symbolic non-Archimedean cardinals: polynomials in a formal infinite unit omega.

Addition and multiplication are the polynomial operations and the order is
lexicographic from the top degree.  ``x ⊴ y`` (some finite multiple of y
reaches x) then reduces to a degree comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Callable, NamedTuple

import numpy as np

_SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


@total_ordering
@dataclass(frozen=True)
class SymCard:
    """c0 + c1*ω + c2*ω² + ..., coefficients low degree first, no trailing zeros."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coeffs)
        if any(c < 0 for c in cs):
            raise ValueError("coefficients must be non-negative")
        while cs and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def of(cls, *coeffs: int) -> "SymCard":
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        """-1 for zero."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "SymCard") -> "SymCard":
        return card_add(self, other)

    def __mul__(self, other: "SymCard | int") -> "SymCard":
        if isinstance(other, int):
            other = SymCard.of(other)
        return card_mul(self, other)

    __rmul__ = __mul__

    def __lt__(self, other: "SymCard") -> bool:
        return _key(self) < _key(other)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for d in range(self.degree, -1, -1):
            c = self.coeffs[d]
            if not c:
                continue
            if d == 0:
                terms.append(str(c))
            else:
                unit = "ω" + (str(d).translate(_SUPERSCRIPTS) if d > 1 else "")
                terms.append(unit if c == 1 else f"{c}{unit}")
        return "+".join(terms)


def _key(x: SymCard) -> tuple:
    return (x.degree, x.coeffs[::-1])


ZERO = SymCard()
ONE = SymCard.of(1)
OMEGA = SymCard.of(0, 1)


def card_add(x: SymCard, y: SymCard) -> SymCard:
    m = max(len(x.coeffs), len(y.coeffs))
    a = x.coeffs + (0,) * (m - len(x.coeffs))
    b = y.coeffs + (0,) * (m - len(y.coeffs))
    return SymCard(tuple(p + q for p, q in zip(a, b)))


def card_mul(x: SymCard, y: SymCard) -> SymCard:
    if x.is_zero or y.is_zero:
        return ZERO
    out = [0] * (len(x.coeffs) + len(y.coeffs) - 1)
    for i, p in enumerate(x.coeffs):
        for j, q in enumerate(y.coeffs):
            out[i + j] += p * q
    return SymCard(tuple(out))


def card_le(x: SymCard, y: SymCard) -> bool:
    return x <= y


def tri_le(x: SymCard, y: SymCard) -> bool:
    """Some finite multiple of y is at least x."""
    return x.is_zero or (not y.is_zero and x.degree <= y.degree)


def tri_lt(x: SymCard, y: SymCard) -> bool:
    return tri_le(x, y) and not tri_le(y, x)


def all_multiples_below(x: SymCard, y: SymCard, small: int = 10) -> bool:
    """n*x < y for every natural n.

    Checking n <= small and one n above y's coefficient sum is exact: if the
    degrees agree, that multiple of x already overtakes y.
    """
    big = sum(y.coeffs) + 1
    return all(card_mul(SymCard.of(k), x) < y for k in (*range(small + 1), big))


Order = Callable[[SymCard, SymCard], bool]


def _broken_le(x: SymCard, y: SymCard) -> bool:
    # deliberately wrong: strict degree comparison, so x ⊴ x fails
    return x.degree < y.degree


class Law(NamedTuple):
    name: str
    statement: str
    # (le, lt, x, y, z, w) -> (antecedent, consequent)
    check: Callable


def _laws() -> tuple[Law, ...]:
    def L(name, statement, fn):
        return Law(name, statement, fn)

    return (
        L("comparability", "x⊴y or y⊴x", lambda le, lt, x, y, z, w: (True, le(x, y) or le(y, x))),
        L(
            "additivity",
            "x⊴y and z≤w ⇒ x+z⊴y+w",
            lambda le, lt, x, y, z, w: (le(x, y) and card_le(z, w), le(x + z, y + w)),
        ),
        L("cancellation", "z=w and x+z◁y+w ⇒ x◁y", lambda le, lt, x, y, z, w: (lt(x + z, y + z), lt(x, y))),
        L("transitivity", "x⊴y⊴z ⇒ x⊴z", lambda le, lt, x, y, z, w: (le(x, y) and le(y, z), le(x, z))),
        L(
            "split",
            "x⊴y+z ⇒ x⊴y or x⊴z",
            lambda le, lt, x, y, z, w: (le(x, y + z), le(x, y) or le(x, z)),
        ),
        L(
            "split-sum",
            "x=y+z ⇒ x⊴y or x⊴z",
            lambda le, lt, x, y, z, w: (True, le(y + z, y) or le(y + z, z)),
        ),
        L(
            "strict-split",
            "x◁y+z ⇒ x◁y or x◁z",
            lambda le, lt, x, y, z, w: (lt(x, y + z), lt(x, y) or lt(x, z)),
        ),
        L("strict-absorb", "x◁x+y ⇒ x◁y", lambda le, lt, x, y, z, w: (lt(x, x + y), lt(x, y))),
        L(
            "left-split",
            "y+z⊴x ⇒ y⊴x and z⊴x",
            lambda le, lt, x, y, z, w: (le(y + z, x), le(y, x) and le(z, x)),
        ),
        L(
            "strict-left-split",
            "y+z◁x ⇒ y◁x and z◁x",
            lambda le, lt, x, y, z, w: (lt(y + z, x), lt(y, x) and lt(z, x)),
        ),
        L("expansion", "x◁y ⇒ x◁y+z", lambda le, lt, x, y, z, w: (lt(x, y), lt(x, y + z))),
        L("subst-left", "x+y⊴z and w=y ⇒ x+w⊴z", lambda le, lt, x, y, z, w: (le(x + y, z), le(x + y, z))),
        L("subst-right", "x⊴y+z and w=y ⇒ x⊴w+z", lambda le, lt, x, y, z, w: (le(x, y + z), le(x, y + z))),
        L("strict-subst-left", "x+y◁z and w=y ⇒ x+w◁z", lambda le, lt, x, y, z, w: (lt(x + y, z), lt(x + y, z))),
        L("strict-subst-right", "x◁y+z and w=y ⇒ x◁w+z", lambda le, lt, x, y, z, w: (lt(x, y + z), lt(x, y + z))),
    )


LAWS = _laws()


@dataclass
class LawResult:
    name: str
    statement: str
    checked: int = 0
    vacuous: int = 0
    counterexamples: list = None

    def __post_init__(self):
        if self.counterexamples is None:
            self.counterexamples = []

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def as_dict(self) -> dict:
        return {
            "law": self.name,
            "statement": self.statement,
            "checked": self.checked,
            "vacuous": self.vacuous,
            "failures": len(self.counterexamples),
            "counterexamples": [[str(c) for c in ce] for ce in self.counterexamples[:3]],
        }


@dataclass
class LawSuiteReport:
    samples: int
    seed: int
    broken: bool
    laws: list[LawResult]
    multiples: LawResult

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.laws) and self.multiples.ok

    @property
    def passed(self) -> int:
        return sum(r.ok for r in self.laws)


def random_card(rng: np.random.Generator, max_degree: int = 3, max_coeff: int = 10**6) -> SymCard:
    deg = int(rng.integers(-1, max_degree + 1))
    if deg < 0:
        return ZERO
    cs = [int(c) if rng.random() > 0.3 else 0 for c in rng.integers(1, max_coeff + 1, size=deg + 1)]
    cs[-1] = cs[-1] or 1
    return SymCard(tuple(cs))


def law_suite(sample_count: int, seed: int = 0, *, broken: bool = False, keep: int = 5) -> LawSuiteReport:
    """Check the fifteen laws and the multiples characterisation of ◁ on random quadruples."""
    rng = np.random.default_rng(seed)
    le: Order = _broken_le if broken else tri_le

    def lt(x, y):
        return le(x, y) and not le(y, x)

    results = [LawResult(law.name, law.statement) for law in LAWS]
    easy = LawResult("multiples", "x◁y ⇔ n·x<y for all n")
    for _ in range(sample_count):
        x, y, z, w = (random_card(rng) for _ in range(4))
        for law, res in zip(LAWS, results):
            ante, cons = law.check(le, lt, x, y, z, w)
            res.checked += 1
            if not ante:
                res.vacuous += 1
            elif not cons and len(res.counterexamples) < keep:
                res.counterexamples.append((x, y, z, w))
        easy.checked += 1
        if lt(x, y) != all_multiples_below(x, y) and len(easy.counterexamples) < keep:
            easy.counterexamples.append((x, y))
    return LawSuiteReport(sample_count, seed, broken, results, easy)


def tri_le_sizes(x: int, y: int) -> bool:
    """⊴ on natural numbers: y >= 1 or x = 0."""
    return tri_le(SymCard.of(x), SymCard.of(y))


def parse_card(text: str) -> SymCard:
    """Read a coefficient list such as "7 0 2" (7 + 2ω²)."""
    parts = text.replace(",", " ").split()
    if not parts:
        return ZERO
    return SymCard(tuple(int(p) for p in parts))
