"""Property-test the order laws on random symbolic cardinals; --broken runs the self-test."""

import argparse

from bicardlab.cardinals import law_suite


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--broken", action="store_true")
    args = ap.parse_args()
    rep = law_suite(args.samples, args.seed, broken=args.broken)
    for r in [*rep.laws, rep.multiples]:
        d = r.as_dict()
        print(f"{'ok  ' if r.ok else 'FAIL'} {d['law']:<14} {d['statement']:<32} "
              f"checked={d['checked']} vacuous={d['vacuous']} failures={d['failures']}")
    print(f"{rep.passed}/{len(rep.laws)} laws pass")


if __name__ == "__main__":
    main()
