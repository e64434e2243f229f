"""Continual-learning replay engine.

Adaptive replay training (auto-tuned loss weights, replay blocking, stored
feature correction) on top of generalized reservoir buffers (q-logarithmic
counters, serial buffer layers, priority-based omission), with deterministic
toy benchmarks and Monte Carlo buffer-probability probes.
"""

from a2er._core import (
    CounterDesign,
    CounterKind,
    ExperimentConfig,
    ExperimentSummary,
    FifoBuffer,
    GaussianGridTask,
    HeadKind,
    LayerConfig,
    Mlp,
    OfferOutcome,
    OfferResult,
    PluralStack,
    ProbeResult,
    Record,
    ReplayItem,
    ReplaySample,
    ReservoirBuffer,
    Rng,
    RunResult,
    Sample,
    SineMixtureTask,
    StackConfig,
    acceptance_curve,
    analytic_membership,
    analytic_retention,
    compute_eta,
    compute_gamma,
    correct_feature,
    counter_value,
    empirical_membership,
    eval_acc,
    eval_kld,
    gen_classification_stream,
    gen_regression_stream,
    gen_switched_stream,
    interpolated_quantile,
    kld_gaussian,
    nll,
    nu_from_zeta,
    q_log,
    rank_weighted_mean,
    rejection_probability,
    reservoir_from_json,
    run_experiment,
    run_single,
    softmax,
    stack_from_json,
    task_seed_for_name,
    update_priority,
)

__all__ = [
    "CounterDesign",
    "CounterKind",
    "ExperimentConfig",
    "ExperimentSummary",
    "FifoBuffer",
    "GaussianGridTask",
    "HeadKind",
    "LayerConfig",
    "Mlp",
    "OfferOutcome",
    "OfferResult",
    "PluralStack",
    "ProbeResult",
    "Record",
    "ReplayItem",
    "ReplaySample",
    "ReservoirBuffer",
    "Rng",
    "RunResult",
    "Sample",
    "SineMixtureTask",
    "StackConfig",
    "acceptance_curve",
    "analytic_membership",
    "analytic_retention",
    "compute_eta",
    "compute_gamma",
    "correct_feature",
    "counter_value",
    "empirical_membership",
    "eval_acc",
    "eval_kld",
    "gen_classification_stream",
    "gen_regression_stream",
    "gen_switched_stream",
    "interpolated_quantile",
    "kld_gaussian",
    "nll",
    "nu_from_zeta",
    "q_log",
    "rank_weighted_mean",
    "rejection_probability",
    "reservoir_from_json",
    "run_experiment",
    "run_single",
    "softmax",
    "stack_from_json",
    "task_seed_for_name",
    "update_priority",
]

__version__ = "0.1.0"
