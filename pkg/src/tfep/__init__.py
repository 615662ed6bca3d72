"""Trimmed-moment inference for heavy-tailed data.

Trimmed means and variances, their asymptotic normal confidence intervals
(one and two samples), heavy-tailed samplers with population trimmed-moment
oracles, a Monte Carlo coverage harness and a CSV-driven command line.
"""

from types import ModuleType as _ModuleType

from .data import DatasetRef, ingest_csv, subsample
from .distributions import (
    DistributionSpec,
    PopulationTrimmedMoments,
    Seed,
    parse_spec,
    population_trimmed_moments,
    quantile,
    sample,
)
from .errors import (
    ConfigurationError,
    DataError,
    DegenerateError,
    DistributionError,
    DomainError,
    InfiniteMomentError,
    NumericalError,
    OverTrimmedError,
    QuadratureError,
    TFEPError,
    UsageError,
)
from .estimators import (
    DiagnosticsReport,
    MomentSummary,
    central_moment,
    diagnostics,
    summarize,
    t_squared,
    trimmed_mean,
    trimmed_variance,
)
from .inference import (
    ConfidenceInterval,
    TwoSampleScaling,
    fep_mean_ci,
    fep_mean_diff_ci,
    fep_variance_ci,
    fep_variance_ratio_ci,
    one_sample_mean_ci,
    one_sample_variance_ci,
    two_sample_mean_diff_ci,
    two_sample_scalings,
    two_sample_variance_ratio_ci,
    z_quantile,
)
from .montecarlo import (
    CoverageResult,
    StudyConfig,
    StudyResult,
    StudyRow,
    coverage_experiment,
    run_one_sample_study,
    run_two_sample_study,
    true_value,
)
from .report import emit_report, study_from_json
from .trimming import TrimmedView, TrimSpec, sort_and_trim, trim_indices

__version__ = "0.1.0"

__all__ = [name for name, obj in globals().items() if not name.startswith("_") and not isinstance(obj, _ModuleType)]
