"""Channels-matching classifier for maximum mutual information classification."""
from .baselines import (
    ComparisonReport,
    compare,
    error_rate,
    extract_threshold_1d,
    mpp_classifier,
    visible_classifier,
)
from .classifier import (
    CmConfig,
    IterationRecord,
    IterationTrace,
    Partition,
    SemanticChannelTable,
    info_surface,
    init_horizontal,
    init_random,
    init_threshold_1d,
    init_vertical,
    matching_one,
    matching_two,
    partition_mi,
    run_cm,
    shannon_channel,
)
from .generators import (
    ClassSetup,
    ClassSpec,
    Component,
    Gaussian1D,
    Gaussian2D,
    discretize,
    example1_setup,
    example2_setup,
    fit_gaussian_smoother,
)
from .kernels import BACKEND
from .probability import (
    Axis,
    FeatureGrid,
    TruthFunction,
    likelihood_from_truth,
    logical_probability,
    sample_log_likelihood,
    semantic_info_conditional,
    semantic_info_point,
    semantic_mi,
    semantic_mi_gaussian_decomposition,
    shannon_mi,
    truth_from_likelihood,
)

__version__ = "0.1.0"
