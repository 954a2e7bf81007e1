"""Print shuttle traces for a few fixed instances, then run a random sweep."""

import argparse

from bicardlab.relations import catalog
from bicardlab.shuttle import normalize_bijection, shuttle, shuttle_sweep
from bicardlab.universe import Concept

CASES = [
    ("TOTAL", 4, [0, 1], [1, 2], [2, 3]),
    ("TOTAL", 6, [0, 1, 2], [1, 2, 3], [3, 4, 5]),
    ("HP", 6, [0, 1], [0, 2], [4, 5]),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for name, n, x, y, z in CASES:
        X, Y, Z = (Concept.of(n, s) for s in (x, y, z))
        f = normalize_bijection(X, Z, dict(zip(X.elements, Z.elements)))
        print(f"-- {name} n={n}")
        print(shuttle(catalog(name, n), X, Y, Z, f).pretty())
    rep = shuttle_sweep(args.count, seed=args.seed)
    print(rep.as_dict())


if __name__ == "__main__":
    main()
