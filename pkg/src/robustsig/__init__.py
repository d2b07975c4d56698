"""Robust one-sample significance tests under variance uncertainty.

The robust rules use critical values from the G-normal tail laws, which bound
the type I error even when each observation's variance is chosen adaptively
(p-hacking by sample selection) within ``[sigma_lower^2, sigma_upper^2]``.
"""
from ._backend import available_backends, get_backend, set_backend
from .adversary import (
    AlternatingStrategy,
    ConstantStrategy,
    IidRandomStrategy,
    NoiseModel,
    OptimalStrategy,
    PathState,
    generate_sequence,
    optimal_sigma,
    strategy_trace,
)
from .bounds import (
    BandEstimate,
    BlockConfig,
    estimate_then_test,
    moving_block_bounds,
    pooled_variance_mean,
    subsample_bounds,
)
from .gnormal import (
    TestKind,
    TestSpec,
    VarianceBand,
    critical_value,
    p1,
    p2,
    p3,
    power_approx,
    self_similar_f,
    std_normal_cdf,
    std_normal_quantile,
)
from .rules import (
    RejectionRule,
    SampleStats,
    TestReport,
    classical_rule,
    decide,
    robust_p_value,
    robust_rule,
    sample_stats,
)

__version__ = "0.1.0"
