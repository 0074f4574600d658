"""Finite-blocklength BLER, latency and throughput analysis of multihop
MIMO decode-and-forward relay networks."""

from mhrelay._core import (  # noqa: F401
    AsymptoticReport,
    BlerIntegrand,
    BlerMethod,
    BlerReport,
    ConfigError,
    FblParams,
    HopBler,
    HopBudget,
    LatencyThroughputReport,
    McConfig,
    McEstimate,
    McEstimator,
    NumericError,
    Objective,
    OptimizationResult,
    RetxConfig,
    Scheme,
    SweepPoint,
    SystemConfig,
    analyze_asymptotic,
    analyze_bler,
    analyze_latency_throughput,
    array_gain,
    build_fbl_params,
    build_hop_budgets,
    capacity,
    cdf_tas_mrc,
    cdf_tas_sc,
    coding_rate,
    db_to_linear,
    dispersion,
    diversity_order_fit,
    e2e_bler,
    e2e_bler_asymptotic,
    e2e_latency,
    e2e_throughput,
    estimate_e2e_bler,
    estimate_hop_bler,
    failure_latency,
    hop_bler_asymptotic,
    hop_bler_closed_form,
    hop_bler_quadrature,
    instantaneous_bler,
    inv_q_function,
    linear_to_db,
    linearized_bler,
    lower_incomplete_gamma,
    max_coding_rate,
    optimize_blocklength,
    optimize_relays,
    q_function,
    run_figure,
    snr_gap_db,
    success_latency,
)

__version__ = "0.1.0"
