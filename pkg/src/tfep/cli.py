"""Command-line front end.

    tfep diagnose   --data incomes.csv --column income
    tfep one-sample --dist pareto:1,1.5 --n 10000 --trim 0,0.05,0.1,0.2
    tfep two-sample --data1 a.csv --data2 b.csv --trim 0,0.1 --subsample 200
    tfep coverage   --dist student:1+5 --target mean,variance --trim 0.1 --n 2000 --reps 2000

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .data import DatasetRef, ingest_csv, subsample
from .distributions import Seed, parse_spec
from .errors import TFEPError, UsageError
from .estimators import diagnostics
from .montecarlo import (
    StudyConfig,
    StudyResult,
    coverage_experiment,
    one_sample_table,
    run_one_sample_study,
    run_two_sample_study,
    two_sample_table,
)
from .report import FORMATS, emit_report
from .trimming import TrimSpec

log = logging.getLogger("tfep")

DEFAULT_SEED = 0
DEFAULT_TRIM = "0,0.05,0.1,0.2"
SEED_ENV = "TFEP_SEED"
SCALING = {"delta": "delta-corrected", "paper": "paper-literal"}

# global flags may appear before or after the subcommand
GLOBAL_DEFAULTS = {"format": "markdown", "out": None, "trim_mode": "symmetric", "precision": 3, "verbose": False}


def parse_trim_grid(text: str, default_mode: str = "symmetric") -> list[TrimSpec]:
    """Parse the ``--trim`` grammar into trimming specifications.

    Accepted forms: ``0.10``, ``0,0.05,0.1``, ``upper:0.10``, ``lower:0.05,0.1``
    and ``k=3,l=97``. Several groups may be joined with ``;``.
    """
    specs: list[TrimSpec] = []
    for group in (g.strip() for g in text.split(";")):
        if not group:
            raise UsageError(f"empty trimming group in {text!r}")
        if group.startswith("k="):
            specs.append(_parse_explicit(group))
            continue
        mode = default_mode
        if ":" in group:
            mode, group = (s.strip() for s in group.split(":", 1))
            if mode not in ("symmetric", "lower", "upper"):
                raise UsageError(f"unknown trim mode {mode!r} in {text!r}")
        for item in group.split(","):
            try:
                tau = float(item)
            except ValueError:
                raise UsageError(f"bad trimming proportion {item.strip()!r} in {text!r}") from None
            specs.append(TrimSpec(mode, tau))  # type: ignore[arg-type]
    return specs


def _parse_explicit(text: str) -> TrimSpec:
    parts = dict(p.split("=", 1) for p in text.replace(" ", "").split(",") if "=" in p)
    if set(parts) != {"k", "l"} or text.count("=") != 2:
        raise UsageError(f"explicit trimming must look like k=3,l=97, got {text!r}")
    try:
        return TrimSpec.explicit(int(parts["k"]), int(parts["l"]))
    except ValueError:
        raise UsageError(f"k and l must be integers, got {text!r}") from None


def resolve_seed(flag: int | None, environ=os.environ) -> int:
    """``--seed`` wins; otherwise ``TFEP_SEED``; otherwise the fixed default."""
    if flag is not None:
        return flag
    raw = environ.get(SEED_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


# -- argument parser ----------------------------------------------------------------


def _add_globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda key: argparse.SUPPRESS) if suppress else GLOBAL_DEFAULTS.get
    g = parser.add_argument_group("output")
    g.add_argument("--format", choices=FORMATS, default=d("format"), help="report format (default markdown)")
    g.add_argument("--out", type=Path, default=d("out"), help="write the report here instead of stdout")
    g.add_argument(
        "--trim-mode",
        choices=("symmetric", "upper", "lower"),
        default=d("trim_mode"),
        help="mode for bare --trim proportions (default symmetric)",
    )
    g.add_argument("--precision", type=int, default=d("precision"), help="decimals in csv/markdown (default 3)")
    g.add_argument("-v", "--verbose", action="store_true", default=d("verbose"))


def _add_data(parser: argparse.ArgumentParser, suffixes: tuple[str, ...]) -> None:
    g = parser.add_argument_group("data input")
    for s in suffixes:
        g.add_argument(f"--data{s}", type=Path, help="CSV file")
        g.add_argument(f"--column{s}", default="0", help="column name or 0-based index (default 0)")
    g.add_argument("--delimiter", default=",", help="field delimiter (default ',')")
    g.add_argument("--no-header", dest="has_header", action="store_false", help="the file has no header row")
    g.add_argument("--subsample", type=int, metavar="T", help="analyse a seeded random subsample of size T")


def _add_study(parser: argparse.ArgumentParser, reps_default: int = 1) -> None:
    parser.add_argument("--trim", default=DEFAULT_TRIM, help=f"trimming grid (default {DEFAULT_TRIM})")
    parser.add_argument("--alpha", type=float, default=0.05, help="1 - confidence level (default 0.05)")
    parser.add_argument("--seed", type=int, help=f"master seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    parser.add_argument("--reps", type=int, default=reps_default, help=f"replications (default {reps_default})")
    parser.add_argument("--workers", type=int, default=1, help="worker processes for replications")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tfep",
        description="Trimmed-moment confidence intervals for heavy-tailed data.",
    )
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("diagnose", help="summary statistics and Jarque-Bera test of a data column")
    _add_data(p, ("",))
    p.add_argument("--seed", type=int, help="seed for --subsample")
    _add_globals(p, suppress=True)

    p = sub.add_parser("one-sample", help="trimmed mean and variance intervals")
    _add_data(p, ("",))
    p.add_argument("--dist", help="simulate from a distribution, e.g. pareto:1,1.5")
    p.add_argument("--n", type=int, help="simulated sample size")
    _add_study(p)
    _add_globals(p, suppress=True)

    p = sub.add_parser("two-sample", help="variance-ratio and mean-difference intervals")
    _add_data(p, ("1", "2"))
    p.add_argument("--dist1")
    p.add_argument("--dist2")
    p.add_argument("--n1", type=int)
    p.add_argument("--n2", type=int)
    p.add_argument("--scaling", choices=tuple(SCALING), default="delta", help="variance-ratio scaling")
    _add_study(p)
    _add_globals(p, suppress=True)

    p = sub.add_parser("coverage", help="Monte Carlo coverage of the intervals")
    p.add_argument("--dist", "--dist1", dest="dist", required=True)
    p.add_argument("--dist2", help="second distribution for mean-diff / var-ratio")
    p.add_argument("--n", "--n1", dest="n", type=int, required=True)
    p.add_argument("--n2", type=int, help="second sample size (default: --n)")
    p.add_argument(
        "--target",
        action="append",
        help="mean, variance, mean-diff or var-ratio; repeat or comma-separate (default mean,variance)",
    )
    p.add_argument("--scaling", choices=tuple(SCALING), default="delta", help="variance-ratio scaling")
    _add_study(p, reps_default=2000)
    _add_globals(p, suppress=True)
    return parser


# -- commands -----------------------------------------------------------------------


def _load(args, suffix: str, seed: int, lane: int):
    path = getattr(args, f"data{suffix}")
    column = getattr(args, f"column{suffix}")
    values = ingest_csv(DatasetRef(path, column, args.delimiter, args.has_header))
    if args.subsample is not None:
        values = subsample(values, args.subsample, Seed(seed, 0, lane))
    return values


def _data_meta(args, seed: int, suffixes: tuple[str, ...]) -> dict:
    meta = {"master_seed": seed}
    for s in suffixes:
        meta[f"data{s}"] = str(getattr(args, f"data{s}"))
        meta[f"column{s}"] = getattr(args, f"column{s}")
    if args.subsample is not None:
        meta["subsample"] = args.subsample
    return meta


def _coverage_grid(trims: list[TrimSpec]) -> tuple[float, ...]:
    if any(t.mode != "symmetric" for t in trims):
        raise UsageError("coverage needs symmetric trimming proportions")
    taus = sorted({t.tau for t in trims})
    return tuple(taus)


def _check_source(args, data_flags: tuple[str, ...], sim_flags: tuple[str, ...]) -> bool:
    has_data = [getattr(args, f) is not None for f in data_flags]
    has_sim = [getattr(args, f) is not None for f in sim_flags]
    if any(has_data) and any(has_sim):
        raise UsageError("give either data files or a simulated distribution, not both")
    if all(has_data):
        return True
    if all(has_sim):
        return False
    need = " and ".join(f"--{f.replace('_', '-')}" for f in data_flags)
    alt = " and ".join(f"--{f}" for f in sim_flags)
    raise UsageError(f"need {need}, or {alt}")


def cmd_diagnose(args, seed: int):
    if args.data is None:
        raise UsageError("diagnose needs --data")
    return diagnostics(_load(args, "", seed, 0)), _data_meta(args, seed, ("",))


def cmd_one_sample(args, seed: int):
    trims = parse_trim_grid(args.trim, args.trim_mode)
    if _check_source(args, ("data",), ("dist", "n")):
        rows = one_sample_table(_load(args, "", seed, 0), trims, args.alpha)
        return StudyResult("one-sample", tuple(rows), _data_meta(args, seed, ("",))), None
    config = StudyConfig(
        "one-sample", parse_spec(args.dist), args.n,
        alpha=args.alpha, replications=args.reps, master_seed=seed, trims=tuple(trims),
    )  # fmt: skip
    return run_one_sample_study(config, workers=args.workers), None


def cmd_two_sample(args, seed: int):
    trims = parse_trim_grid(args.trim, args.trim_mode)
    mode = SCALING[args.scaling]
    if _check_source(args, ("data1", "data2"), ("dist1", "dist2", "n1", "n2")):
        x = _load(args, "1", seed, 0)
        y = _load(args, "2", seed, 1)
        rows = two_sample_table(x, y, trims, args.alpha, mode)
        meta = {**_data_meta(args, seed, ("1", "2")), "scaling_mode": mode}
        return StudyResult("two-sample", tuple(rows), meta), None
    config = StudyConfig(
        "two-sample", parse_spec(args.dist1), args.n1, dist2=parse_spec(args.dist2), n2=args.n2,
        alpha=args.alpha, replications=args.reps, master_seed=seed, scaling_mode=mode, trims=tuple(trims),
    )  # fmt: skip
    return run_two_sample_study(config, workers=args.workers), None


def cmd_coverage(args, seed: int):
    grid = _coverage_grid(parse_trim_grid(args.trim, args.trim_mode))
    targets = tuple(t.strip() for group in (args.target or ["mean,variance"]) for t in group.split(","))
    dist2 = parse_spec(args.dist2) if args.dist2 else None
    config = StudyConfig(
        "coverage", parse_spec(args.dist), args.n, grid, dist2,
        args.n2 if args.n2 is not None else (args.n if dist2 else None),
        alpha=args.alpha, replications=args.reps, master_seed=seed,
        scaling_mode=SCALING[args.scaling], targets=targets,
    )  # fmt: skip
    return coverage_experiment(config, workers=args.workers), config.to_dict()


COMMANDS = {
    "diagnose": cmd_diagnose,
    "one-sample": cmd_one_sample,
    "two-sample": cmd_two_sample,
    "coverage": cmd_coverage,
}


def run(args: argparse.Namespace) -> str:
    """Execute a parsed command and return the rendered report."""
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    seed = resolve_seed(getattr(args, "seed", None))
    if getattr(args, "reps", 1) < 1 or getattr(args, "workers", 1) < 1:
        raise UsageError("--reps and --workers must be at least 1")
    result, meta = COMMANDS[args.command](args, seed)
    return emit_report(result, args.format, precision=args.precision, meta=meta)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        text = run(args)
    except TFEPError as exc:
        print(f"tfep: error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
        log.info("wrote %s", args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
