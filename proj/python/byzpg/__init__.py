"""Byzantine fault-tolerant federated policy-gradient simulator."""

from byzpg._core import (  # noqa: F401
    ChainOracleSpec,
    PolicySpec,
    action_log_probs,
    bucketize,
    cartpole_step,
    conformance,
    default_config_json,
    enumerate_exact_gradient,
    enumerate_expected_return,
    gda_select,
    init_params,
    krum,
    load_chain_spec,
    log_prob_gradient,
    mda_select,
    metrics_csv,
    param_count,
    rfa,
    run_experiment_json,
)

__all__ = [
    "ChainOracleSpec",
    "PolicySpec",
    "action_log_probs",
    "bucketize",
    "cartpole_step",
    "conformance",
    "default_config_json",
    "enumerate_exact_gradient",
    "enumerate_expected_return",
    "gda_select",
    "init_params",
    "krum",
    "load_chain_spec",
    "log_prob_gradient",
    "mda_select",
    "metrics_csv",
    "param_count",
    "rfa",
    "run_experiment_json",
]
