"""Survey every relation at n <= 4 and sampled relations at n = 5..8; write JSON lines per n."""

import argparse
import json
from pathlib import Path

from bicardlab.cli import RunConfig, resolve_jobs, run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--sample", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", default="1")
    ap.add_argument("--out", default="results/survey")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = resolve_jobs(args.jobs)
    for n in range(1, args.max_n + 1):
        exhaustive = n <= 4
        cfg = RunConfig("survey", n=n, seed=args.seed, jobs=jobs, exhaustive=exhaustive,
                        sample=None if exhaustive else args.sample)
        text, code = run(cfg)
        (out / f"n{n}.jsonl").write_text(text, encoding="utf-8")
        summary = json.loads(text.splitlines()[-1])["summary"]
        print(f"n={n} relations={summary['distinct']} satisfiable={summary['satisfiable']} "
              f"violations={summary['violations']} failures={sum(summary['failures'].values())} exit={code}")


if __name__ == "__main__":
    main()
