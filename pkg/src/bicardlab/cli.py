"""Command-line front end.

Every subcommand writes JSON lines (one object per relation or law) followed
by a summary object; ``--format csv`` and ``--format text`` are flat
projections of the same rows.  Exit codes: 0 ran cleanly, 1 a property check
failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from . import dsl
from .abstraction import (
    basal,
    check_thm_bc,
    check_top_triviality,
    restricted_satisfiable,
    satisfiable,
)
from .cardinals import law_suite
from .classify import check_tightness, trichotomy_check
from .relations import (
    CATALOG_NAMES,
    LATTICE_CAP,
    SAMPLE_CAP,
    CapabilityError,
    InvariantRelation,
    RelationError,
    catalog,
    duplicate_flags,
    lattice,
    refines,
    sample,
    validate,
)
from .relcat import relcat_verdict
from .shuttle import shuttle_sweep
from .universe import MAX_N, PairType, UniverseError, orbit_types

EXIT_OK, EXIT_FALSIFIED, EXIT_INPUT = 0, 1, 2
JOBS_ENV = "BICARDLAB_JOBS"


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: Optional[int] = None
    catalog: Optional[str] = None
    rel: Optional[str] = None
    dsl: Optional[str] = None
    seed: int = 0
    jobs: int = 1
    format: str = "json"
    out: Optional[str] = None
    sample: Optional[int] = None
    exhaustive: bool = False
    slice: Optional[int] = None
    mode: str = "eq"
    budget: Optional[int] = None
    broken: bool = False

    @property
    def has_source(self) -> bool:
        return any(v is not None for v in (self.catalog, self.rel, self.dsl))


def resolve_jobs(value: Optional[str]) -> int:
    raw = value if value is not None else os.environ.get(JOBS_ENV, "1")
    if raw in ("max", "0"):
        return os.cpu_count() or 1
    try:
        jobs = int(raw)
    except ValueError:
        raise InputError(f"--jobs must be a positive integer or 'max', got {raw!r}") from None
    if jobs < 1:
        raise InputError(f"--jobs must be positive, got {jobs}")
    return jobs


def _quadruple_file(text: str) -> bool:
    lines = [l.strip() for l in text.splitlines() if l.strip() and not l.strip().startswith("#")]
    return bool(lines) and all(len(l.split()) == 4 and all(p.isdigit() for p in l.split()) for l in lines)


def _checked(types: Iterable[PairType], n: int, name: Optional[str]) -> InvariantRelation:
    report = validate(types, n)
    if not report.ok:
        raise InputError(f"not an invariant equivalence relation at n={n}: {report.describe()}")
    return InvariantRelation(n, frozenset(types), name)


def resolve_relation(cfg: RunConfig) -> InvariantRelation:
    if cfg.n is None:
        raise InputError("--n is required")
    n = cfg.n
    sources = [s for s in (cfg.catalog, cfg.rel, cfg.dsl) if s is not None]
    if len(sources) != 1:
        raise InputError("give exactly one of --catalog, --rel, --dsl")
    try:
        if cfg.catalog is not None:
            if cfg.catalog not in CATALOG_NAMES:
                raise InputError(f"unknown catalog relation {cfg.catalog!r}; known: {', '.join(CATALOG_NAMES)}")
            return catalog(cfg.catalog, n)
        if cfg.rel is not None:
            path = Path(cfg.rel)
            if not path.is_file():
                raise InputError(f"no such file: {cfg.rel}")
            text = path.read_text(encoding="utf-8")
            if _quadruple_file(text):
                E = InvariantRelation.parse(text, path.stem)
                if E.n != n:
                    raise InputError(f"{cfg.rel} describes n={E.n}, but --n is {n}")
                return _checked(E.yes_types, n, E.name)
            rf = dsl.load_rel(text)
            return _checked(dsl.types_satisfying(rf.expr, n), n, rf.name or path.stem)
        expr = dsl.parse(cfg.dsl)
        return _checked(dsl.types_satisfying(expr, n), n, dsl.to_source(expr))
    except (dsl.DSLError, RelationError, UniverseError) as exc:
        raise InputError(str(exc)) from None


def _name(E: InvariantRelation) -> str:
    return E.name or "relation"


# commands: each returns (rows, summary, exit code)


def cmd_classify(cfg: RunConfig):
    E = resolve_relation(cfg)
    n = cfg.n
    tri = trichotomy_check(E, n)
    tight = check_tightness(E, n)
    row = {
        "relation": _name(E),
        "n": n,
        "profiles": [p.as_dict() for p in tri.profiles],
        "trichotomy_ok": tri.ok,
        "violations": list(tri.violations),
        "exempt_overlaps": list(tri.overlaps),
        "tightness_ok": tight.ok,
        "tightness_violations": list(tight.violations),
    }
    ok = tri.ok and tight.ok
    return [row], {"relations": 1, "violations": len(tri.violations) + len(tight.violations)}, _code(ok)


def cmd_sat(cfg: RunConfig):
    E = resolve_relation(cfg)
    n = cfg.n
    row = {"relation": _name(E), "n": n, **satisfiable(E).as_dict()}
    ok = True
    if cfg.slice is not None:
        if cfg.mode not in ("eq", "le"):
            raise InputError(f"--mode must be eq or le, got {cfg.mode!r}")
        if not 0 <= cfg.slice <= n:
            raise InputError(f"--slice must be in 0..{n}")
        if not validate(E.yes_types, n).ok:
            raise InputError("relation is not valid")
        row["restricted"] = {"k": cfg.slice, "mode": cfg.mode, **restricted_satisfiable(E, n, cfg.slice, cfg.mode).as_dict()}
    bc = check_thm_bc(E, n)
    if bc.applicable:
        row["thm_bc"] = bc.as_dict()
        ok = bc.confirmed
    return [row], {"relations": 1, "satisfiable": row["satisfiable"]}, _code(ok)


def cmd_relcat(cfg: RunConfig):
    E = resolve_relation(cfg)
    rep = relcat_verdict(E, cfg.n, cfg.budget, cfg.seed)
    row = {"relation": _name(E), "n": cfg.n}
    if not rep.satisfiable:
        row.update({"skipped": "unsatisfiable", "class_count": rep.class_count})
        return [row], {"relations": 1, "skipped": 1}, EXIT_OK
    row.update(rep.as_dict())
    row["verdict"] = "RC" if rep.rc else "not-RC"
    return [row], {"relations": 1, "consistent": rep.consistent}, _code(rep.consistent)


def cmd_laws(cfg: RunConfig):
    samples = cfg.sample if cfg.sample is not None else 10_000
    rep = law_suite(samples, cfg.seed, broken=cfg.broken)
    rows = [r.as_dict() for r in rep.laws]
    rows.append(rep.multiples.as_dict())
    sweep = shuttle_sweep(200, cfg.seed, max_n=5)
    rows.append({"law": "shuttle sweep", **sweep.as_dict()})
    ok = rep.ok and sweep.ok
    summary = {
        "samples": samples,
        "seed": cfg.seed,
        "broken_order": cfg.broken,
        "laws_passed": rep.passed,
        "laws_total": len(rep.laws),
        "multiples_ok": rep.multiples.ok,
        "shuttle_ok": sweep.ok,
    }
    return rows, summary, _code(ok)


def _survey_row(args) -> dict:
    n, key, budget, seed = args
    ots = orbit_types(n)
    E = InvariantRelation(n, frozenset(ots[i] for i in key))
    tri = trichotomy_check(E, n)
    tight = check_tightness(E, n)
    sat = satisfiable(E)
    bc = check_thm_bc(E, n)
    top = check_top_triviality(E, n)
    row = {
        "types": list(key),
        "class_count": sat.class_count,
        "satisfiable": sat.satisfiable,
        "profiles": [p.label.value for p in tri.profiles],
        "trichotomy_ok": tri.ok,
        "tightness_ok": tight.ok,
        "thm_bc": bc.confirmed if bc.applicable else None,
        "top_ok": top.ok,
    }
    if tri.overlaps:
        row["exempt_overlaps"] = list(tri.overlaps)
    if sat.satisfiable:
        rc = relcat_verdict(E, n, budget, seed)
        row.update({
            "basal_refines": refines(basal(n), E),
            "ccoa": rc.ccoa,
            "rc": rc.rc,
            "relcat_agrees": rc.consistent,
        })
    return row


_CHECKS = (
    ("trichotomy", "trichotomy_ok"),
    ("tightness", "tightness_ok"),
    ("thm_bc", "thm_bc"),
    ("top_triviality", "top_ok"),
    ("basal_refines", "basal_refines"),
    ("relcat", "relcat_agrees"),
)


def cmd_survey(cfg: RunConfig):
    n = cfg.n
    if n is None:
        raise InputError("--n is required")
    if cfg.exhaustive:
        if n > LATTICE_CAP:
            raise InputError(f"--exhaustive is limited to n <= {LATTICE_CAP}; use --sample")
        rels, dup = list(lattice(n)), None
        source = "exhaustive"
    else:
        if n > SAMPLE_CAP:
            raise InputError(f"sampling is limited to n <= {SAMPLE_CAP}")
        count = cfg.sample if cfg.sample is not None else 1000
        rels = sample(n, cfg.seed, count)
        dup = duplicate_flags(rels)
        source = f"sample:{count}:seed={cfg.seed}"
    distinct = sorted({E.key for E in rels})
    budget = cfg.budget if cfg.budget is not None else (None if n <= 4 else 20)
    work = [(n, key, budget, cfg.seed) for key in distinct]
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_survey_row, work, chunksize=max(1, len(work) // (4 * cfg.jobs))))
    else:
        results = [_survey_row(w) for w in work]
    by_key = dict(zip(distinct, results))
    rows = []
    for i, E in enumerate(rels):
        row = {"index": i, **by_key[E.key]}
        if dup is not None:
            row["duplicate"] = dup[i]
        rows.append(row)
    failures = {name: sum(1 for r in results if r.get(field) is False) for name, field in _CHECKS}
    summary = {
        "n": n,
        "source": source,
        "relations": len(rels),
        "distinct": len(distinct),
        "satisfiable": sum(r["satisfiable"] for r in results),
        "violations": sum(any(p == "Violation" for p in r["profiles"]) for r in results),
        "failures": failures,
    }
    return rows, summary, _code(not any(failures.values()) and not summary["violations"])


def cmd_validate_dsl(cfg: RunConfig):
    try:
        if cfg.dsl is not None:
            expr, name = dsl.parse(cfg.dsl), None
        elif cfg.rel is not None:
            path = Path(cfg.rel)
            if not path.is_file():
                raise InputError(f"no such file: {cfg.rel}")
            rf = dsl.load_rel(path.read_text(encoding="utf-8"))
            expr, name = rf.expr, rf.name
        else:
            raise InputError("give --dsl or --rel")
    except dsl.DSLError as exc:
        raise InputError(str(exc)) from None
    row = {"canonical": dsl.to_source(expr)}
    if name:
        row["name"] = name
    if cfg.n is not None:
        types = dsl.types_satisfying(expr, cfg.n)
        report = validate(types, cfg.n)
        row.update({"n": cfg.n, "valid": report.ok, "types": len(types)})
        if not report.ok:
            row["report"] = report.describe()
            raise InputError(f"not an invariant equivalence relation at n={cfg.n}: {report.describe()}")
    return [row], {"ok": True}, EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "sat": cmd_sat,
    "relcat": cmd_relcat,
    "laws": cmd_laws,
    "survey": cmd_survey,
    "validate-dsl": cmd_validate_dsl,
}


def _code(ok: bool) -> int:
    return EXIT_OK if ok else EXIT_FALSIFIED


# output


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, ensure_ascii=False, separators=(",", ":"))
        else:
            out[key] = v
    return out


def render(rows: Sequence[dict], summary: dict, fmt: str) -> str:
    if fmt == "json":
        lines = [json.dumps(r, ensure_ascii=False) for r in rows]
        lines.append(json.dumps({"summary": summary}, ensure_ascii=False))
        return "\n".join(lines) + "\n"
    flat = [_flatten(r) for r in rows]
    if fmt == "csv":
        fields: list[str] = []
        for r in flat:
            fields.extend(k for k in r if k not in fields)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(flat)
        return buf.getvalue()
    lines = ["  ".join(f"{k}={v}" for k, v in r.items()) for r in flat]
    lines.append("summary: " + "  ".join(f"{k}={v}" for k, v in _flatten(summary).items()))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help=f"universe size (1..{MAX_N})")
    common.add_argument("--catalog", help=f"named relation: {', '.join(CATALOG_NAMES)}")
    common.add_argument("--rel", help=".rel file (DSL condition or 'a b c d' type lines)")
    common.add_argument("--dsl", help="condition over a, b, c, d, n, x, y, sd, csd")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--sample", "--samples", dest="sample", type=int, help="sample size")
    common.add_argument("--exhaustive", action="store_true", help="use every relation at n")
    common.add_argument("--slice", type=int, help="restricted principle at concept size k")
    common.add_argument("--mode", default="eq", help="restricted region: eq or le")
    common.add_argument("--budget", type=int, help="operators sampled per relation in relcat")
    common.add_argument("--jobs", help=f"worker processes, or 'max' (default ${JOBS_ENV} or 1)")
    common.add_argument("--format", default="json", choices=("json", "csv", "text"))
    common.add_argument("--out", help="write the report here instead of stdout")
    p = argparse.ArgumentParser(prog="bicardlab", description="Finite-model lab for invariant abstraction principles.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "laws":
            sp.add_argument("--broken", action="store_true", help="self-test with a deliberately wrong order")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.n is not None and not 1 <= args.n <= MAX_N:
        raise InputError(f"--n must be in 1..{MAX_N}")
    return RunConfig(
        command=args.command,
        n=args.n,
        catalog=args.catalog,
        rel=args.rel,
        dsl=args.dsl,
        seed=args.seed,
        jobs=resolve_jobs(args.jobs),
        format=args.format,
        out=args.out,
        sample=args.sample,
        exhaustive=args.exhaustive,
        slice=args.slice,
        mode=args.mode,
        budget=args.budget,
        broken=getattr(args, "broken", False),
    )


def run(cfg: RunConfig) -> tuple[str, int]:
    rows, summary, code = COMMANDS[cfg.command](cfg)
    summary = {"command": cfg.command, **summary, "exit": code}
    return render(rows, summary, cfg.format), code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = config_from_args(args)
        text, code = run(cfg)
    except (InputError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
