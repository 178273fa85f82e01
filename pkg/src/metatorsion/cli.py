"""Command-line front end.

    metatorsion compute  --scenario S [--step N]
    metatorsion sequence --scenario S [--out CSV] [--jobs N]
    metatorsion verify   [--suite NAME] [--seed N] [--out REPORT]
    metatorsion fit      CSV [--tail-fraction F] [--threshold T]

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bounds import (
    REPORT_HEADER,
    BoundReport,
    GrowthRecord,
    HypothesisViolation,
    check_MA,
    fit_exponential_base,
    growth_sequence,
    prop_exp_bound,
    subexp_ratio_check,
    tail_ratio_stats,
)
from .groupring import Sublattice
from .metabelian import subgroup_abelianization
from .scenario import ConfigError, load_scenario
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _scenario(args):
    if not args.scenario:
        raise UsageError("--scenario is required")
    sc = load_scenario(args.scenario)
    for attr in ("seed", "jobs", "tail_fraction", "threshold", "out"):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(sc, attr, value)
    return sc


def cmd_compute(args) -> int:
    sc = _scenario(args)
    step = args.step if args.step is not None else sc.steps[-1]
    G = sc.group()
    H = sc.subgroup(G, step)
    inv = subgroup_abelianization(G, H)
    print(
        f"step={step} torsion={inv.torsion_size} log2={inv.log2_torsion:.15g} "
        f"rank={inv.free_rank} index={H.index} a={H.index_in_A} m={H.P.m}"
    )
    return EXIT_OK


def write_csv(records, path: str | None) -> None:
    text = GrowthRecord.CSV_HEADER + "\n" + "".join(r.to_csv_row() + "\n" for r in records)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit_reports(reports, stream) -> bool:
    ok = True
    for rep in reports:
        print(rep.to_line(), file=stream)
        ok &= rep.holds
    return ok


def cmd_sequence(args) -> int:
    sc = _scenario(args)
    G = sc.group()
    schedule = sc.schedule(G)
    records = growth_sequence(G, schedule, sc.steps, jobs=sc.jobs)
    try:
        write_csv(records, sc.out)
    except OSError as exc:
        raise UsageError(f"cannot write {sc.out}: {exc.strerror}") from None
    if not sc.checks:
        return EXIT_OK
    reports: list[BoundReport] = []
    for H in schedule:
        if "exp" in sc.checks and H.contains_derived:
            reports += prop_exp_bound(G, H, H.index)
        if "MA" in sc.checks and H.P == Sublattice.full(G.r):
            reports.append(check_MA(G, H))
    if "subexp" in sc.checks:
        try:
            reports.append(subexp_ratio_check(records, sc.tail_fraction, sc.threshold))
        except HypothesisViolation as exc:
            raise UsageError(f"subexp check: {exc}") from None
    stream = sys.stderr if sc.out in (None, "-") else sys.stdout
    print(REPORT_HEADER, file=stream)
    return EXIT_OK if _emit_reports(reports, stream) else EXIT_FAIL


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else 0
    try:
        results = run_suite(args.suite, seed)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    lines = [REPORT_HEADER]
    all_ok = True
    for name, reports in results.items():
        failed = [r for r in reports if not r.holds]
        all_ok &= not failed
        print(f"{'PASS' if not failed else 'FAIL'} {name}: {len(reports) - len(failed)}/{len(reports)} hold (seed={seed})")
        for r in failed[:10]:
            print(f"  counterexample: {r.to_line()}")
        lines += [r.to_line() for r in reports]
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
    return EXIT_OK if all_ok else EXIT_FAIL


def read_csv(path: str) -> list[GrowthRecord]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    rows = text.splitlines()
    if not rows or rows[0].strip() != GrowthRecord.CSV_HEADER:
        raise UsageError(f"{path}: row 1: expected header {GrowthRecord.CSV_HEADER!r}")
    records = []
    for i, row in enumerate(rows[1:], start=2):
        if not row.strip():
            continue
        fields = row.split(",")
        if len(fields) != 8:
            raise UsageError(f"{path}: row {i}: expected 8 fields, got {len(fields)}")
        try:
            step, index, a, m, torsion = (int(x) for x in fields[:5])
            free_rank = int(fields[7])
            float(fields[5]), float(fields[6])
        except ValueError as exc:
            raise UsageError(f"{path}: row {i}: {exc}") from None
        if index < 1 or torsion < 1:
            raise UsageError(f"{path}: row {i}: index and torsion must be positive")
        records.append(GrowthRecord(step, index, a, m, torsion, free_rank))
    if not records:
        raise UsageError(f"{path}: no data rows")
    return records


def cmd_fit(args) -> int:
    records = read_csv(args.csv)
    tail_fraction = args.tail_fraction if args.tail_fraction is not None else 0.3
    threshold = args.threshold if args.threshold is not None else 0.05
    print(f"D_hat={fit_exponential_base(records)!r}")
    stats = tail_ratio_stats(records, tail_fraction)
    print(" ".join(f"{k}={v:.15g}" if isinstance(v, float) else f"{k}={v}" for k, v in stats.items()))
    try:
        rep = subexp_ratio_check(records, tail_fraction, threshold)
    except (HypothesisViolation, ValueError) as exc:
        print(f"subexp=skipped ({exc})")
        return EXIT_OK
    print(f"subexp={'holds' if rep.holds else 'fails'} {rep.to_line()}")
    return EXIT_OK if rep.holds else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metatorsion",
        description="Torsion of abelianized finite-index subgroups of split metabelian groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", help="scenario file")
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int)
        p.add_argument("--tail-fraction", dest="tail_fraction", type=float)
        p.add_argument("--threshold", type=float)
        p.add_argument("--out", help="output path")

    p = sub.add_parser("compute", help="invariants of one subgroup of the schedule")
    common(p)
    p.add_argument("--step", type=int, help="schedule step (default: last)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sequence", help="write the growth sequence as CSV")
    common(p)
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("verify", help="run verification suites")
    common(p)
    p.add_argument("--suite", default="all", help=f"one of {', '.join(list(SUITES) + ['all'])}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fit", help="fit the exponential base from a sequence CSV")
    p.add_argument("csv")
    p.add_argument("--tail-fraction", dest="tail_fraction", type=float)
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
