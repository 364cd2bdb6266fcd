"""Detection of change points in the correlation of a bivariate time series.

The statistic compares prefix correlations against the full-segment
correlation, normalized by a HAC long-run variance scale so that its null
limit is the supremum of the absolute value of a standard Brownian bridge.
Binary segmentation locates multiple breaks; VAR(1) and DCC generators and
a replication harness reproduce the reference simulation designs.
"""

from .cusum import (
    CusumProfile,
    Interval,
    estimate_changepoint,
    frac_to_index,
    prefix_end,
    profile,
)
from .errors import (
    CorrsegError,
    DegenerateSegmentError,
    InputError,
    NonPositiveVarianceError,
    SegmentTooShortError,
)
from .lrv import (
    DEFAULT_MIN_SEGMENT,
    HacConfig,
    LrvComponents,
    demeaned_moment_vectors,
    lrv_components,
    lrv_scale,
)
from .montecarlo import (
    CellSummary,
    Experiment,
    ExperimentCell,
    ExperimentSummary,
    run_experiment,
    summary_to_csv,
    summary_to_dict,
    sweep,
)
from .report import (
    iterations_to_csv,
    render_text,
    report_from_dict,
    report_from_json,
    report_to_dict,
    report_to_json,
    segments_to_csv,
)
from .segmentation import (
    AlphaLevel,
    ChangePointReport,
    IterationRecord,
    SegmentationConfig,
    alpha_schedule,
    critical_value,
    detect,
    detect_with_profiles,
    kolmogorov_cdf,
)
from .series import (
    SegmentMoments,
    SeriesPair,
    accumulate,
    pearson,
    prefix_correlations,
)
from .simulate import (
    BreakSchedule,
    DccSpec,
    DominanceProfile,
    GarchParams,
    Var1Spec,
    derive_seed,
    dominance_profile,
    simulate_dcc,
    simulate_var1,
    spec_from_dict,
    spec_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaLevel",
    "BreakSchedule",
    "CellSummary",
    "ChangePointReport",
    "CorrsegError",
    "CusumProfile",
    "DccSpec",
    "DEFAULT_MIN_SEGMENT",
    "DegenerateSegmentError",
    "DominanceProfile",
    "Experiment",
    "ExperimentCell",
    "ExperimentSummary",
    "GarchParams",
    "HacConfig",
    "InputError",
    "Interval",
    "IterationRecord",
    "LrvComponents",
    "NonPositiveVarianceError",
    "SegmentMoments",
    "SegmentTooShortError",
    "SegmentationConfig",
    "SeriesPair",
    "Var1Spec",
    "accumulate",
    "alpha_schedule",
    "critical_value",
    "demeaned_moment_vectors",
    "derive_seed",
    "detect",
    "detect_with_profiles",
    "dominance_profile",
    "estimate_changepoint",
    "frac_to_index",
    "iterations_to_csv",
    "kolmogorov_cdf",
    "lrv_components",
    "lrv_scale",
    "pearson",
    "prefix_correlations",
    "prefix_end",
    "profile",
    "render_text",
    "report_from_dict",
    "report_from_json",
    "report_to_dict",
    "report_to_json",
    "run_experiment",
    "segments_to_csv",
    "simulate_dcc",
    "simulate_var1",
    "spec_from_dict",
    "spec_to_dict",
    "summary_to_csv",
    "summary_to_dict",
    "sweep",
]
