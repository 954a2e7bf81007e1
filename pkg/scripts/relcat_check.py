"""Relative categoricity against cardinality coarsening for every satisfiable relation at n <= 4."""

import argparse

from bicardlab.relations import catalog, enumerate_all
from bicardlab.relcat import relcat_verdict


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=4)
    args = ap.parse_args()
    for n in range(1, args.max_n + 1):
        sat = rc = agree = 0
        for E in enumerate_all(n):
            rep = relcat_verdict(E, n)
            if not rep.satisfiable:
                continue
            sat += 1
            rc += bool(rep.rc)
            agree += bool(rep.agrees) and rep.agrees_bicard is not False
        print(f"n={n} satisfiable={sat} rc={rc} agreeing={agree}")
    cp = relcat_verdict(catalog("CP", 4))
    print(f"CP at n=4: rc={cp.rc} ccoa={cp.ccoa}")
    if cp.witness:
        print("  non-isomorphic operators:")
        for op in cp.witness:
            print("   ", op)


if __name__ == "__main__":
    main()
