"""Acceptance gate: eleven criteria, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import contextlib
import io
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from bicardlab.abstraction import (  # noqa: E402
    basal,
    check_thm_bc,
    check_top_triviality,
    indicator_check,
    restricted_satisfiable,
    satisfiable,
    top_slices,
)
from bicardlab.cardinals import law_suite  # noqa: E402
from bicardlab.classify import EXEMPT_NOTE, check_tightness, trichotomy_check  # noqa: E402
from bicardlab.cli import main  # noqa: E402
from bicardlab.relations import CATALOG_NAMES, catalog, enumerate_all, lattice, refines, sample  # noqa: E402
from bicardlab.relcat import relcat_verdict  # noqa: E402
from bicardlab.shuttle import shuttle_sweep  # noqa: E402
from oracles import basal_class_count, invariant_partitions  # noqa: E402

SEED = 20240601
RESULTS: list[str] = []


def record(num: int, title: str, ok: bool, detail: str) -> None:
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {title} ({detail})")


def sweep(n: int, count: int = 10_000, seed: int = SEED):
    """Distinct relations for the property sweeps.

    Exhaustive at n <= 4; at n = 5, 6 the samples are joined with the full closure lattice.
    """
    if n <= 4:
        return list(enumerate_all(n))
    rels = set(sample(n, seed + n, count))
    rels.update(catalog(name, n) for name in CATALOG_NAMES)
    if n <= 6:
        rels.update(lattice(n))
    return sorted(rels, key=lambda E: E.key)


def criterion_1():
    t0 = time.time()
    checked = bad = 0
    oracle_ok = all(
        sorted(sorted(tuple(t) for t in E.yes_types) for E in enumerate_all(n))
        == sorted(sorted(ts) for ts in invariant_partitions(n))
        for n in (1, 2, 3)
    )
    for n in range(1, 7):
        for E in sweep(n):
            rep = trichotomy_check(E, n)
            checked += 1
            stray = [p.k for p in rep.profiles if p.note == EXEMPT_NOTE and not (p.k in (0, n) or n <= 2)]
            if not rep.ok or stray:
                bad += 1
    ok = oracle_ok and bad == 0
    return ok, f"{checked} relations over n=1..6, {bad} failures, partition oracle {'agrees' if oracle_ok else 'DISAGREES'}, {time.time() - t0:.0f}s"


def criterion_2():
    checked = bad = 0
    for n in range(1, 7):
        for E in sweep(n):
            checked += 1
            bad += not check_tightness(E, n).ok
    return bad == 0, f"{checked} relations, {bad} mixed slices"


def criterion_3():
    rep = shuttle_sweep(1000, seed=SEED, min_n=3, max_n=6)
    ok = rep.ok and rep.instances == 1000
    by_n = ", ".join(f"n={k}:{v}" for k, v in sorted(rep.by_n.items()))
    return ok, f"{rep.instances} instances ({by_n}), {len(rep.failures)} failures"


def criterion_4():
    rep = law_suite(100_000, seed=SEED)
    ok = rep.ok and rep.passed == 15
    return ok, f"{rep.samples} samples, {rep.passed}/15 laws, multiples {'ok' if rep.multiples.ok else 'FAILED'}"


def criterion_5():
    bp = [indicator_check(catalog("BP", n), n) for n in range(2, 6)]
    total = [indicator_check(catalog("TOTAL", n), n) for n in range(2, 6)]
    total.append(indicator_check(catalog("TOTAL", 6), 6, budget=500, seed=SEED))
    ok = all(v.indicator and v.exhaustive for v in bp) and not any(v.indicator for v in total)
    maps = sum(v.checked for v in bp)
    return ok, f"BP indicator on {maps} non-permutations n=2..5; TOTAL refuted at n=2..6"


def criterion_6():
    fails = []
    for n in range(1, 9):
        for name in ("HP", "BP"):
            if satisfiable(catalog(name, n)).satisfiable:
                fails.append(f"{name}@{n}")
        if satisfiable(catalog("LCP", n)).satisfiable != (n <= 2):
            fails.append(f"LCP@{n}")
        if not satisfiable(catalog("NP", n)).satisfiable:
            fails.append(f"NP@{n}")
    if not restricted_satisfiable(catalog("LCP", 4), 4, 2, "eq").satisfiable:
        fails.append("LCP(=X)@4")
    if restricted_satisfiable(catalog("LCP", 6), 6, 3, "eq").satisfiable:
        fails.append("LCP(=X)@6")
    for n in range(2, 7):
        for k in range(1, n):
            if restricted_satisfiable(catalog("BLV", n), n, k, "eq").satisfiable:
                fails.append(f"BLV(=X)@{n},{k}")
    return not fails, "all counts exact" if not fails else "mismatches: " + ", ".join(fails)


def criterion_7():
    applicable = bad = 0
    total = 0
    for n in (6, 8):
        rels = set(sample(n, SEED + n, 10_000))
        rels.update(catalog(name, n) for name in CATALOG_NAMES)
        for E in rels:
            total += 1
            rep = check_thm_bc(E, n)
            if rep.nontrivial:
                applicable += 1
                bad += not rep.confirmed
    return bad == 0 and applicable > 0, f"{total} distinct relations at n=6,8, {applicable} nontrivial at k=n/2, {bad} exceptions"


def criterion_8():
    sat = bad = 0
    for n in (6, 7):
        rels = lattice(6) if n == 6 else sweep(7)
        for E in rels:
            rep = check_top_triviality(E, n)
            sat += rep.satisfiable
            bad += not rep.ok
    return bad == 0 and sat > 0, f"{sat} satisfiable relations at n=6 (full lattice) and n=7, TOP slices {top_slices(6)}/{top_slices(7)}, {bad} exceptions"


def criterion_9():
    checked = bad = surj = 0
    for n in range(1, 5):
        for E in enumerate_all(n):
            rep = relcat_verdict(E, n)
            if not rep.satisfiable:
                continue
            checked += 1
            if not rep.exhaustive or not rep.agrees or rep.agrees_bicard is False:
                bad += 1
            if rep.surjective_rc is not None:
                surj += 1
    cp = relcat_verdict(catalog("CP", 4))
    cp_ok = cp.satisfiable and cp.ccoa is False and cp.rc is False and cp.witness is not None
    ok = bad == 0 and cp_ok
    return ok, f"{checked} satisfiable relations n<=4, {bad} disagreements, {surj} with surjective operators, CP witness {'found' if cp_ok else 'MISSING'}"


def criterion_10():
    bad = sat = 0
    for n in range(1, 7):
        E0 = basal(n)
        for E in lattice(n):
            if E.class_count <= n:
                sat += 1
                bad += not refines(E0, E)
    for E in sample(6, SEED, 10_000):
        if E.class_count <= 6:
            bad += not refines(basal(6), E)
    count = basal(6).class_count
    ok = bad == 0 and count == 45 == basal_class_count(6)
    return ok, f"{sat} satisfiable relations n<=6, {bad} not refined, class_count(basal,6)={count}"


def _survey(args):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["survey", *args])
    return code, buf.getvalue().encode()


def criterion_11():
    configs = [["--n", "4", "--exhaustive"], ["--n", "5", "--sample", "2000", "--seed", "11"], ["--n", "6", "--sample", "500"]]
    same = True
    for args in configs:
        outs = [_survey([*args, "--jobs", j]) for j in ("1", "4", "max")]
        same &= len({o for _, o in outs}) == 1 and all(c == 0 for c, _ in outs)
    return same, f"{len(configs)} survey configs byte-identical across jobs 1, 4, max"


CRITERIA = [
    (1, "trichotomy, no Violation profiles", criterion_1),
    (2, "tightness of nontrivial slices", criterion_2),
    (3, "shuttle carries X onto every relatively finite Z", criterion_3),
    (4, "fifteen order laws and the multiples characterisation", criterion_4),
    (5, "bicardinality is an indicator of permutations", criterion_5),
    (6, "bad company satisfiability counts", criterion_6),
    (7, "nontrivial middle slice forces more than n classes", criterion_7),
    (8, "satisfiable relations are trivial on TOP slices", criterion_8),
    (9, "relative categoricity iff cardinality coarsening", criterion_9),
    (10, "basal relation refines every satisfiable relation", criterion_10),
    (11, "survey output independent of parallelism", criterion_11),
]


@pytest.mark.slow
@pytest.mark.parametrize("num, title, fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(num, title, fn):
    ok, detail = fn()
    record(num, title, ok, detail)
    print(RESULTS[-1])
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num, title, fn in CRITERIA:
        ok, detail = fn()
        record(num, title, ok, detail)
        print(RESULTS[-1], flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
