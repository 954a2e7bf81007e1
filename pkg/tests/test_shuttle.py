import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from bicardlab.classify import Profile, classify_slice
from bicardlab.relations import catalog, from_predicate, sample
from bicardlab.shuttle import (
    STAGE_TAGS,
    PreconditionError,
    almost_complementary,
    normalize_bijection,
    opportune,
    random_instance,
    relatively_finite,
    shuttle,
    shuttle_sweep,
    symmetric_pair,
    tri_le_concepts,
)
from bicardlab.universe import Concept, PartialInjection, Permutation, induced_permutation


def C(n, *xs):
    return Concept.of(n, xs)


def test_tri_le_examples():
    assert not tri_le_concepts(C(3, 0), C(3))
    assert tri_le_concepts(C(3), C(3, 1, 2))
    assert tri_le_concepts(C(6, 0, 1, 2), C(6, 5))


@pytest.mark.parametrize(
    "n, x, y, expected",
    [(2, (0,), (1,), True), (4, (0, 1), (1, 2), False), (4, (0, 1), (2, 3), True), (4, (0,), (0,), False)],
)
def test_almost_complementary(n, x, y, expected):
    assert almost_complementary(C(n, *x), C(n, *y)) is expected


@pytest.mark.parametrize(
    "n, x, y, expected",
    [(3, (0,), (0,), True), (3, (0,), (1,), False), (3, (0, 1, 2), (0, 1, 2), False)],
)
def test_symmetric_pair(n, x, y, expected):
    assert symmetric_pair(C(n, *x), C(n, *y)) is expected


def test_size_mismatch_is_precondition_error():
    with pytest.raises(PreconditionError):
        almost_complementary(C(3, 0), C(3, 1, 2))
    with pytest.raises(PreconditionError):
        symmetric_pair(C(3, 0), C(3, 1, 2))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_never_both_ac_and_symmetric(n):
    for x in range(1 << n):
        for y in range(1 << n):
            X, Y = Concept(x, n), Concept(y, n)
            if x != y and len(X) == len(Y):
                assert not (almost_complementary(X, Y) and symmetric_pair(X, Y))


def test_finite_collapses():
    n = 4
    for x in range(1 << n):
        for y in range(1 << n):
            X, Y = Concept(x, n), Concept(y, n)
            if len(X) != len(Y):
                continue
            assert almost_complementary(X, Y) == (x ^ y == (1 << n) - 1 and 0 < len(X) < n)
            assert symmetric_pair(X, Y) == (x == y and 0 < len(X) < n)


def test_opportune_examples():
    assert opportune(catalog("TOTAL", 4), C(4, 0, 1), C(4, 1, 2))
    assert not opportune(catalog("LCP", 4), C(4, 0, 1), C(4, 2, 3))
    assert not opportune(catalog("BLV", 4), C(4, 0, 1), C(4, 1, 2))


def test_opportune_needs_equal_sizes():
    # related under complement pairing but sizes differ, and the slice is not trivial
    E = from_predicate(3, lambda t: t.sd == 0 or t.csd == 0)
    X, Y = C(3, 0), C(3, 1, 2)
    assert E.holds(X, Y)
    assert not opportune(E, X, Y)
    assert classify_slice(E, 3, 1).label is not Profile.TRIVIAL


@pytest.mark.parametrize("x, y, expected", [((0, 1), (1, 2), True), ((0,), (0, 1), False), ((2,), (2,), True)])
def test_relatively_finite(x, y, expected):
    assert relatively_finite(C(4, *x), C(4, *y)) is expected


def test_induced_permutation_is_involution():
    p = induced_permutation(PartialInjection.from_mapping({0: 2, 1: 3}), 4)
    assert p == Permutation.from_cycles(4, [(0, 2), (1, 3)])
    assert p.then(p) == Permutation.identity(4)
    q = induced_permutation(PartialInjection.from_mapping({0: 1}), 3)
    assert q(2) == 2 and q(0) == 1


def test_shuttle_small_example():
    E = catalog("TOTAL", 4)
    X, Y, Z = C(4, 0, 1), C(4, 1, 2), C(4, 2, 3)
    f = normalize_bijection(X, Z, {0: 2, 1: 3})
    tr = shuttle(E, X, Y, Z, f)
    assert [s.tag for s in tr.stages] == list(STAGE_TAGS)
    assert sorted(tr.final(i) for i in X) == [2, 3]


def test_shuttle_identity_target():
    E = catalog("TOTAL", 4)
    X, Y = C(4, 0, 1), C(4, 1, 2)
    tr = shuttle(E, X, Y, X, {0: 0, 1: 1})
    assert tr.final.is_identity()


def test_shuttle_n6_example():
    E = catalog("TOTAL", 6)
    X, Y, Z = C(6, 0, 1, 2), C(6, 1, 2, 3), C(6, 3, 4, 5)
    f = normalize_bijection(X, Z, {0: 3, 1: 4, 2: 5})
    tr = shuttle(E, X, Y, Z, f)
    assert len(tr.stages) == 4
    assert set(tr.final(i) for i in X) == {3, 4, 5}
    text = tr.pretty()
    assert "AtoX" in text and "ExttoS" in text


def test_shuttle_rejects_bad_inputs():
    E = catalog("TOTAL", 4)
    X, Y = C(4, 0, 1), C(4, 1, 2)
    with pytest.raises(PreconditionError):
        shuttle(E, X, X, C(4, 2, 3), {0: 2, 1: 3})
    with pytest.raises(PreconditionError):
        shuttle(E, X, Y, C(4, 2), {0: 2})
    with pytest.raises(PreconditionError):
        shuttle(E, X, Y, C(4, 1, 3), {0: 1, 1: 3})  # does not fix X & Z


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 6), st.integers(0, 2**32 - 1))
def test_shuttle_postconditions(n, seed):
    rng = np.random.default_rng(seed)
    E = sample(n, seed % 997, 1)[0]
    inst = next(filter(None, (random_instance(E, rng) for _ in range(40))), None)
    assume(inst is not None)
    X, Y, Z, f = inst
    tr = shuttle(E, X, Y, Z, f)
    g = {z: x for x, z in f.items()}
    cur = X
    for st_ in tr.stages:
        # each stage moves exactly its zone and the zone's preimages
        assert st_.perm.moved() == set(st_.zone) | {g[z] for z in st_.zone}
        for sub in st_.substeps:
            assert sub.fixes in ("X", "Y")
        cur = Concept(sum(1 << st_.perm(i) for i in cur), n)
        assert E.holds(X, cur)
    assert cur == Z
    # the slice holding an opportune pair is trivial
    assert classify_slice(E, n, len(X)).label is Profile.TRIVIAL


def test_normalize_bijection_fixes_overlap():
    X, Z = C(5, 0, 1, 2), C(5, 1, 2, 3)
    f = normalize_bijection(X, Z, {0: 1, 1: 2, 2: 3})
    assert f[1] == 1 and f[2] == 2 and f[0] == 3


def test_sweep():
    rep = shuttle_sweep(150, seed=2, max_n=5)
    assert rep.ok and rep.instances == 150
