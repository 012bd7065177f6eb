"""``evidential`` command line: combine, approx, bench, gen.

Exit codes: 0 success, 2 usage or parse error, 3 numerical error (total
conflict, mass violation), 1 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .approx import D1, KLX, Bayesian, Summarize
from .core import (
    EvidentialError,
    InvalidMass,
    MassNotNormalized,
    TotalConflict,
    combine_with_conflict,
    pignistic,
)
from .formats import (
    build_experiment,
    format_bpa,
    parse_bpa,
    parse_config,
    stats_csv,
    trials_csv,
)
from .metrics import error_triple
from .testbed import SUBSET_DISTS, TRACKS, GenConfig, gen_random_bpa, run_experiment, trial_rng

EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 1

NUMERIC_ERRORS = (TotalConflict, MassNotNormalized, InvalidMass)


def _default_seed() -> int:
    return int(os.environ.get("EVIDENTIAL_SEED", "0"))


def _read_bpa(path):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    try:
        return parse_bpa(text)
    except EvidentialError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def cmd_combine(args) -> int:
    bpas = [_read_bpa(p) for p in args.files]
    result = bpas[0]
    for step, m in enumerate(bpas[1:], start=1):
        try:
            result, conflict = combine_with_conflict(result, m)
        except TotalConflict:
            print(f"error: total conflict at step {step}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"step {step}: conflict {conflict!r}", file=sys.stderr)
    sys.stdout.write(format_bpa(result))
    return 0


def _method_from_args(args):
    if args.method == "bayes":
        return Bayesian()
    if args.method == "klx":
        l = None if args.l in (None, "inf") else int(args.l)
        return KLX(1 if args.k is None else args.k, l, 0.01 if args.x is None else args.x)
    if args.k is None:
        raise ValueError(f"--method {args.method} requires --k")
    return Summarize(args.k) if args.method == "summarize" else D1(args.k)


def cmd_approx(args) -> int:
    m = _read_bpa(args.file)
    try:
        method = _method_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = method(m)
    sys.stdout.write(format_bpa(out))
    if args.stats:
        e = error_triple(pignistic(m), pignistic(out))
        print(
            f"n_original={len(m)} n_approx={len(out)} "
            f"error1={e.error1!r} error2={e.error2} error3={e.error3}",
            file=sys.stderr,
        )
    return 0


def _bench_settings(args) -> dict[str, str]:
    settings = parse_config(Path(args.config).read_text(encoding="utf-8")) if args.config else {}
    settings.setdefault("seed", str(_default_seed()))
    flags = {
        "trials": args.trials, "combinations": args.combinations, "seed": args.seed,
        "methods": args.methods, "track": args.track, "frame_size": args.frame_size,
        "focal_count": args.focal_count, "rate": args.rate, "subset_dist": args.subset_dist,
    }
    settings.update({k: str(v) for k, v in flags.items() if v is not None})
    return settings


def cmd_bench(args) -> int:
    cfg = build_experiment(_bench_settings(args))
    records = []
    stats = run_experiment(cfg, workers=args.workers, sink=records.append)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trials.csv").write_text(trials_csv(cfg, records, stats), encoding="utf-8")
    (out / "stats.csv").write_text(stats_csv(cfg, stats), encoding="utf-8")
    print(
        f"{stats.trials} trials ({stats.aborted} aborted on total conflict) -> {out}",
        file=sys.stderr,
    )
    return 0


def cmd_gen(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    cfg = GenConfig(args.frame_size, args.focal_count, seed, args.rate, args.subset_dist)
    sys.stdout.write(format_bpa(gen_random_bpa(cfg, trial_rng(seed, 0))))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evidential", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("combine", help="combine bpa documents with Dempster's rule")
    p.add_argument("files", nargs="+", help="two or more bpa documents ('-' for stdin)")
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("approx", help="approximate a bpa document")
    p.add_argument("file")
    p.add_argument("--method", required=True, choices=("bayes", "klx", "summarize", "d1"))
    p.add_argument("--k", type=int)
    p.add_argument("--l", help="upper bound on kept focal elements, or 'inf'")
    p.add_argument("--x", type=float)
    p.add_argument("--stats", action="store_true", help="print sizes and errors to stderr")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("bench", help="run the randomized approximation benchmark")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--trials", type=int)
    p.add_argument("--combinations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--methods", help="comma-separated method names")
    p.add_argument("--track", choices=TRACKS)
    p.add_argument("--frame-size", type=int)
    p.add_argument("--focal-count", type=int)
    p.add_argument("--rate", type=float)
    p.add_argument("--subset-dist", choices=SUBSET_DISTS)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="bench_out", help="output directory for trials.csv and stats.csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="emit a random bpa document")
    p.add_argument("--frame-size", type=int, default=32)
    p.add_argument("--focal-count", type=int, default=8)
    p.add_argument("--seed", type=int)
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--subset-dist", choices=SUBSET_DISTS, default="uniform-size")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "combine" and len(args.files) < 2:
        print("error: combine needs at least two files", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except TotalConflict as exc:
        print(f"error: total conflict ({exc})", file=sys.stderr)
        return EXIT_NUMERIC
    except NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (EvidentialError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
