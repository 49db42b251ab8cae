"""Network reconstruction from steady states of coupled phase oscillators."""

from ._steadynet import (
    ArgumentError,
    Config,
    ConfigError,
    HyperNetwork,
    PairwiseNetwork,
    auc,
    binary_metrics,
    gen_er,
    gen_simplex,
    gen_weighted,
    is_connected,
    load_config,
    load_edge_list,
    natural_step,
    parse_config,
    rhs,
    roc_curve,
    run_pipeline,
)

__all__ = [
    "ArgumentError",
    "Config",
    "ConfigError",
    "HyperNetwork",
    "PairwiseNetwork",
    "auc",
    "binary_metrics",
    "gen_er",
    "gen_simplex",
    "gen_weighted",
    "is_connected",
    "load_config",
    "load_edge_list",
    "natural_step",
    "parse_config",
    "rhs",
    "roc_curve",
    "run_pipeline",
]
