"""Reproducible simulation studies and coverage experiments.

Replication ``r`` of a study draws sample 1 from ``Seed(master, r, 0)`` and
sample 2 from ``Seed(master, r, 1)``; every trimming level reuses those same
samples. Results therefore depend only on the master seed, never on the
number of workers or the order in which replications finish.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

from .distributions import DistributionSpec, Seed, population_trimmed_moments, sample
from .errors import ConfigurationError, TFEPError
from .inference import (
    SCALING_MODES,
    ConfidenceInterval,
    ScalingMode,
    one_sample_mean_ci,
    one_sample_variance_ci,
    two_sample_mean_diff_ci,
    two_sample_variance_ratio_ci,
)
from .trimming import TRIM_MODES, TrimSpec, sort_and_trim

StudyKind = Literal["one-sample", "two-sample", "coverage"]

ONE_SAMPLE_TARGETS = ("mean", "variance")
TWO_SAMPLE_TARGETS = ("mean-difference", "variance-ratio")
TARGET_ALIASES = {
    "mean": "mean",
    "variance": "variance",
    "var": "variance",
    "mean-diff": "mean-difference",
    "mean-difference": "mean-difference",
    "var-ratio": "variance-ratio",
    "variance-ratio": "variance-ratio",
}


def canonical_target(name: str) -> str:
    try:
        return TARGET_ALIASES[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown target {name!r}; expected one of mean, variance, mean-diff, var-ratio"
        ) from None


@dataclass(frozen=True)
class StudyConfig:
    kind: StudyKind
    dist1: DistributionSpec
    n1: int
    tau_grid: tuple[float, ...] = (0.0, 0.05, 0.10, 0.20)
    dist2: DistributionSpec | None = None
    n2: int | None = None
    alpha: float = 0.05
    replications: int = 1
    master_seed: int = 0
    scaling_mode: ScalingMode = "delta-corrected"
    trim_mode: str = "symmetric"
    targets: tuple[str, ...] = ()
    trims: tuple[TrimSpec, ...] = ()

    def __post_init__(self):
        if self.kind not in ("one-sample", "two-sample", "coverage"):
            raise ConfigurationError(f"unknown study kind {self.kind!r}")
        grid = tuple(float(t) for t in self.tau_grid)
        if not grid:
            raise ConfigurationError("tau grid must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError(f"tau grid must be strictly increasing, got {grid}")
        if any(not 0.0 <= t < 0.5 for t in grid):
            raise ConfigurationError(f"every tau must lie in [0, 0.5), got {grid}")
        object.__setattr__(self, "tau_grid", grid)
        if self.trim_mode not in TRIM_MODES or self.trim_mode == "explicit":
            raise ConfigurationError(f"trim mode must be symmetric, lower or upper, got {self.trim_mode!r}")
        if self.scaling_mode not in SCALING_MODES:
            raise ConfigurationError(f"unknown scaling mode {self.scaling_mode!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.replications < 1:
            raise ConfigurationError("replications must be at least 1")
        if self.n1 < 2:
            raise ConfigurationError("n1 must be at least 2")
        targets = tuple(canonical_target(t) for t in self.targets)
        if not targets:
            targets = TWO_SAMPLE_TARGETS if self.kind == "two-sample" else ONE_SAMPLE_TARGETS
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "trims", tuple(self.trims))
        if self.trims and self.kind == "coverage":
            raise ConfigurationError("coverage studies take a tau grid, not explicit trims")
        if self.needs_second_sample:
            if self.dist2 is None or self.n2 is None:
                raise ConfigurationError("two-sample targets need dist2 and n2")
            if self.n2 < 2:
                raise ConfigurationError("n2 must be at least 2")

    @property
    def needs_second_sample(self) -> bool:
        return self.kind == "two-sample" or any(t in TWO_SAMPLE_TARGETS for t in self.targets)

    def trim(self, tau: float) -> TrimSpec:
        return TrimSpec(self.trim_mode, tau)  # type: ignore[arg-type]

    def trim_specs(self) -> list[TrimSpec]:
        """Table rows: ``trims`` when given (any mode, explicit k/l allowed), else the tau grid."""
        return list(self.trims) or [self.trim(t) for t in self.tau_grid]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dist1": str(self.dist1),
            "dist2": None if self.dist2 is None else str(self.dist2),
            "n1": self.n1,
            "n2": self.n2,
            "tau_grid": list(self.tau_grid),
            "alpha": self.alpha,
            "replications": self.replications,
            "master_seed": self.master_seed,
            "scaling_mode": self.scaling_mode,
            "trim_mode": self.trim_mode,
            "targets": list(self.targets),
            "trims": [str(t) for t in self.trim_specs()],
        }


@dataclass(frozen=True)
class StudyRow:
    """One trimming level of one replication.

    ``first``/``second`` are the mean and variance intervals for one-sample
    studies, the variance-ratio and mean-difference intervals for
    two-sample studies. A failed interval is ``None`` and ``error`` says why.
    """

    replication: int
    level: str
    tau: float | None
    first: ConfidenceInterval | None
    second: ConfidenceInterval | None
    error: str | None = None


@dataclass(frozen=True)
class StudyResult:
    """Rows of a one- or two-sample table plus the metadata needed to reproduce it."""

    kind: Literal["one-sample", "two-sample"]
    rows: tuple[StudyRow, ...]
    meta: dict = field(default_factory=dict)

    @property
    def labels(self) -> tuple[str, str]:
        return ("mean", "variance") if self.kind == "one-sample" else ("variance-ratio", "mean-difference")


@dataclass(frozen=True)
class CoverageResult:
    target: str
    tau: float
    nominal: float
    empirical_coverage: float
    mean_width: float
    replications: int
    true_value: float
    failures: int = 0
    covered: int = field(default=0, repr=False)

    @property
    def standard_error(self) -> float:
        p = self.empirical_coverage
        return math.sqrt(p * (1.0 - p) / self.replications)


# -- helpers ---------------------------------------------------------------------


def _draw(config: StudyConfig, replication: int):
    x = sample(config.dist1, config.n1, Seed(config.master_seed, replication, 0))
    y = None
    if config.needs_second_sample:
        y = sample(config.dist2, config.n2, Seed(config.master_seed, replication, 1))
    return x, y


def _safe(fn, *args):
    try:
        return fn(*args), None
    except TFEPError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _run_chunks(worker, config, payload, reps: range, workers: int) -> list:
    """Evaluate ``worker(config, payload, rep_range)`` over contiguous chunks, keeping rep order."""
    if workers <= 1 or len(reps) <= 1:
        return worker(config, payload, reps)
    size = math.ceil(len(reps) / workers)
    chunks = [reps[i : i + size] for i in range(0, len(reps), size)]
    out: list = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(worker, [config] * len(chunks), [payload] * len(chunks), chunks):
            out.extend(part)
    return out


# -- table studies ------------------------------------------------------------------


def _level(spec: TrimSpec) -> tuple[str, float | None]:
    if spec.mode == "explicit":
        return str(spec), None
    if spec.mode == "symmetric":
        return f"{spec.tau:.2f}", spec.tau
    return f"{spec.mode}:{spec.tau:.2f}", spec.tau


def _errors(*messages: str | None) -> str | None:
    return "; ".join(m for m in messages if m) or None


def one_sample_table(values, trims, alpha: float = 0.05, replication: int = 0) -> list[StudyRow]:
    """Mean and variance intervals of one sample at each trimming specification."""
    rows = []
    for spec in trims:
        level, tau = _level(spec)
        view, err = _safe(sort_and_trim, values, spec)
        if view is None:
            rows.append(StudyRow(replication, level, tau, None, None, err))
            continue
        mean_ci, e1 = _safe(one_sample_mean_ci, view, alpha)
        var_ci, e2 = _safe(one_sample_variance_ci, view, alpha)
        rows.append(StudyRow(replication, level, tau, mean_ci, var_ci, _errors(e1, e2)))
    return rows


def two_sample_table(
    values1, values2, trims, alpha: float = 0.05, mode: ScalingMode = "delta-corrected", replication: int = 0
) -> list[StudyRow]:
    """Variance-ratio and mean-difference intervals at each trimming specification."""
    rows = []
    for spec in trims:
        level, tau = _level(spec)
        v1, e1 = _safe(sort_and_trim, values1, spec)
        v2, e2 = _safe(sort_and_trim, values2, spec)
        if v1 is None or v2 is None:
            rows.append(StudyRow(replication, level, tau, None, None, _errors(e1, e2)))
            continue
        ratio, e3 = _safe(two_sample_variance_ratio_ci, v1, v2, alpha, mode)
        diff, e4 = _safe(two_sample_mean_diff_ci, v1, v2, alpha)
        rows.append(StudyRow(replication, level, tau, ratio, diff, _errors(e3, e4)))
    return rows


def _one_sample_rows(config: StudyConfig, _payload, reps: range) -> list[StudyRow]:
    trims = config.trim_specs()
    rows = []
    for r in reps:
        x, _ = _draw(config, r)
        rows.extend(one_sample_table(x, trims, config.alpha, r))
    return rows


def _two_sample_rows(config: StudyConfig, _payload, reps: range) -> list[StudyRow]:
    trims = config.trim_specs()
    rows = []
    for r in reps:
        x, y = _draw(config, r)
        rows.extend(two_sample_table(x, y, trims, config.alpha, config.scaling_mode, r))
    return rows


def run_one_sample_study(config: StudyConfig, workers: int = 1) -> StudyResult:
    """Mean and variance intervals for every trimming level.

    Errors in a single row are recorded on that row instead of aborting the study.
    """
    if config.kind != "one-sample":
        raise ConfigurationError(f"expected a one-sample config, got {config.kind!r}")
    rows = _run_chunks(_one_sample_rows, config, None, range(config.replications), workers)
    return StudyResult("one-sample", tuple(rows), config.to_dict())


def run_two_sample_study(config: StudyConfig, workers: int = 1) -> StudyResult:
    """Variance-ratio and mean-difference intervals per trimming level."""
    if config.kind != "two-sample":
        raise ConfigurationError(f"expected a two-sample config, got {config.kind!r}")
    rows = _run_chunks(_two_sample_rows, config, None, range(config.replications), workers)
    return StudyResult("two-sample", tuple(rows), config.to_dict())


# -- coverage ------------------------------------------------------------------------


def _population_parameter(spec: DistributionSpec, tau: float, what: str) -> float:
    """Trimmed mean or variance of ``spec``; ``inf`` for an infinite untrimmed variance."""
    if tau == 0.0:
        if what == "mean" and not spec.moment_exists(1):
            if spec.family == "pareto":
                return math.inf
            raise ConfigurationError(f"{spec} has no mean; coverage at tau=0 is undefined")
        if what == "variance" and not spec.moment_exists(2):
            # E(X - c)^2 is infinite for every c, so no finite interval can cover it
            return math.inf
        if not spec.moment_exists(4):
            return _untrimmed_low_moment(spec, what)
    m = population_trimmed_moments(spec, tau)
    return m.mu_tau if what == "mean" else m.sigma2_tau


def _untrimmed_low_moment(spec: DistributionSpec, what: str) -> float:
    a, b = spec.params
    if spec.family == "pareto":
        mean = a * b / (b - 1.0)
        return mean if what == "mean" else a * a * b / ((b - 1.0) ** 2 * (b - 2.0))
    # student with finite mean (df > 1) and, for the variance, df > 2
    return b if what == "mean" else a / (a - 2.0)


def true_value(config: StudyConfig, target: str, tau: float) -> float:
    """Population value of ``target`` at trimming level ``tau`` (symmetric window).

    Raises:
        ConfigurationError: the parameter does not exist (e.g. a Cauchy mean at tau = 0).
    """
    if target == "mean":
        return _population_parameter(config.dist1, tau, "mean")
    if target == "variance":
        return _population_parameter(config.dist1, tau, "variance")
    if target == "mean-difference":
        m1 = _population_parameter(config.dist1, tau, "mean")
        m2 = _population_parameter(config.dist2, tau, "mean")
        if math.isinf(m1) or math.isinf(m2):
            raise ConfigurationError("mean difference with an infinite mean is undefined")
        return m1 - m2
    v1 = _population_parameter(config.dist1, tau, "variance")
    v2 = _population_parameter(config.dist2, tau, "variance")
    if math.isinf(v2):
        raise ConfigurationError("variance ratio with an infinite denominator variance is undefined")
    return v1 / v2


def _coverage_outcomes(config: StudyConfig, truths: dict, reps: range) -> list[list[tuple[bool, float | None]]]:
    # per replication: one (covered, width) per (target, tau) cell, in cell order
    cells = list(truths)
    out = []
    for r in reps:
        x, y = _draw(config, r)
        views = {}
        rep = []
        for target, tau in cells:
            key = (tau, target in TWO_SAMPLE_TARGETS)
            if key not in views:
                spec = config.trim(tau)
                v1, _ = _safe(sort_and_trim, x, spec)
                v2 = _safe(sort_and_trim, y, spec)[0] if key[1] else None
                views[key] = (v1, v2)
            v1, v2 = views[key]
            ci = None
            if v1 is not None and (v2 is not None or not key[1]):
                if target == "mean":
                    ci, _ = _safe(one_sample_mean_ci, v1, config.alpha)
                elif target == "variance":
                    ci, _ = _safe(one_sample_variance_ci, v1, config.alpha)
                elif target == "mean-difference":
                    ci, _ = _safe(two_sample_mean_diff_ci, v1, v2, config.alpha)
                else:
                    ci, _ = _safe(two_sample_variance_ratio_ci, v1, v2, config.alpha, config.scaling_mode)
            if ci is None:
                rep.append((False, None))
            else:
                rep.append((ci.contains(truths[(target, tau)]), ci.width))
        out.append(rep)
    return out


def coverage_experiment(config: StudyConfig, workers: int = 1) -> list[CoverageResult]:
    """Empirical coverage of each target's interval against its population value.

    Replications whose interval cannot be formed count as misses and are
    reported in ``failures``.

    Raises:
        ConfigurationError: before any sampling, if a population value is undefined.
    """
    if config.kind != "coverage":
        raise ConfigurationError(f"expected a coverage config, got {config.kind!r}")
    if config.trim_mode != "symmetric":
        raise ConfigurationError("coverage targets are defined for symmetric trimming only")
    truths = {(target, tau): true_value(config, target, tau) for target in config.targets for tau in config.tau_grid}
    outcomes = _run_chunks(_coverage_outcomes, config, truths, range(config.replications), workers)
    results = []
    for j, (target, tau) in enumerate(truths):
        column = [rep[j] for rep in outcomes]
        covered = sum(1 for hit, _ in column if hit)
        widths = [w for _, w in column if w is not None]
        results.append(
            CoverageResult(
                target=target,
                tau=tau,
                nominal=1.0 - config.alpha,
                empirical_coverage=covered / config.replications,
                mean_width=math.fsum(widths) / len(widths) if widths else math.nan,
                replications=config.replications,
                true_value=truths[(target, tau)],
                failures=config.replications - len(widths),
                covered=covered,
            )
        )
    return results
