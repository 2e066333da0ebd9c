"""Locally differentially private frequency estimation with negatively
correlated pairwise randomized response."""

__version__ = "0.1.0"

from jrr.errors import (
    DatasetFormatError,
    EnumerationSizeError,
    InfeasibleCorrelationError,
    JrrError,
    MetricUndefinedError,
    ParameterError,
    SamplerInfeasibleError,
)
from jrr.mechanisms import (
    JointTable,
    PerturbParams,
    SamplerConfig,
    joint_table,
    jrr_perturb_pair,
    kjrr_perturb_pair,
    oue_jrr_perturb_pair,
    rr_perturb,
    sampler_config,
    sampler_decide,
)
from jrr.grouping import Cohort, RAssignment, assign_r, make_cohort, perturb_cohort, random_pairing
from jrr.estimation import (
    EstimationResult,
    are,
    estimate,
    estimate_counts,
    jrr_variance,
    mse,
    relative_increase,
    rr_variance,
    underperforming_range,
)
from jrr.privacy import (
    PrivacyBudget,
    SearchConfig,
    effective_epsilon,
    is_feasible,
    p_extremes,
    search_params,
)
from jrr.oracle import (
    ExactDistribution,
    all_pairings,
    enumerate_reports,
    enumerate_sampler_joint,
    exact_estimator_moments,
    exact_privacy_ratio,
)
from jrr.datasets import DatasetSummary, load_dataset, summarize, synthesize
from jrr.experiment import ExperimentConfig, MetricsRow, run_experiment, write_csv

__all__ = [
    "JrrError", "ParameterError", "InfeasibleCorrelationError",
    "SamplerInfeasibleError", "EnumerationSizeError", "DatasetFormatError",
    "MetricUndefinedError",
    "PerturbParams", "JointTable", "SamplerConfig",
    "rr_perturb", "joint_table", "jrr_perturb_pair", "sampler_config",
    "sampler_decide", "kjrr_perturb_pair", "oue_jrr_perturb_pair",
    "Cohort", "RAssignment", "random_pairing", "make_cohort", "assign_r",
    "perturb_cohort",
    "EstimationResult", "estimate", "estimate_counts", "rr_variance",
    "jrr_variance", "mse", "are", "relative_increase", "underperforming_range",
    "PrivacyBudget", "SearchConfig", "p_extremes", "effective_epsilon",
    "is_feasible", "search_params",
    "ExactDistribution", "all_pairings", "enumerate_reports",
    "exact_estimator_moments", "exact_privacy_ratio", "enumerate_sampler_joint",
    "DatasetSummary", "load_dataset", "summarize", "synthesize",
    "ExperimentConfig", "MetricsRow", "run_experiment", "write_csv",
]
