"""Smooth and rough subsampling estimators for weakly dependent series."""
from .errors import *  # noqa: F401,F403
from .extremes import (
    MAXIMUM,
    GevSpec,
    NormalizationPair,
    QuantilePinning,
    ar1_limit_cdf_K,
    ar1_limit_quantile_K,
    estimate_normalizers,
    gev_cdf,
    limit_cdf_H,
    max_statistic,
    normalized_curve,
    theoretical_normalizers_ar1,
)
from .montecarlo import ExperimentConfig, MonteCarloSummary, bias_bound, run_experiment, sup_distance
from .processes import Ar1Params, LarchParams, TimeSeries, simulate_ar1, simulate_larch
from .subsample import (
    EstimatorCurve,
    Scheme,
    Statistic,
    curve_quantile,
    make_windows,
    normalized_mean,
    ramp_kernel,
    rough_estimate,
    smooth_estimate,
)

__version__ = "0.1.0"
