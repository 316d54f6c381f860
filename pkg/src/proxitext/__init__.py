"""Proximal causal inference with designed binary proxies.

The package covers four jobs: checking a proxy design structurally on a
causal DAG (d-separation of the proximal conditions), falsifying a proxy
pair empirically through the conditional odds-ratio gate, estimating the
average causal effect with a two-stage proximal regression, and
generating the seeded synthetic benchmarks that exercise all of it.
"""

__version__ = "0.1.0"

from .dag import (
    BUILTIN_GRAPH_NAMES,
    CausalDag,
    ConditionReport,
    RoleAssignment,
    builtin_graph,
    check_proximal_structure,
    d_separated,
    find_open_path,
    format_edge_list,
    parse_edge_list,
)
from .data import Dataset, read_csv, write_csv
from .errors import BootstrapError, DegenerateProxyError, StageOneWarning
from .oddsratio import (
    GateDecision,
    OddsRatioResult,
    crosstab_odds_ratio,
    gamma_ci,
    gamma_fit,
    gamma_point,
    gate,
)
from .pipeline import (
    PipelineConfig,
    PipelineReport,
    run_gotcha_bench,
    run_pipeline,
    run_table1_experiment,
)
from .proximal import (
    AceEstimate,
    ace_ci,
    completeness_check,
    estimate_ace_backdoor,
    estimate_ace_proximal,
)
from .proxies import (
    DiagnosticsReport,
    ExternalProxy,
    ThresholdProxy,
    TrainedLogisticProxy,
    load_external_predictions,
    proxy_diagnostics,
    train_logistic_proxy,
)
from .regress import (
    DesignMatrix,
    LinearModel,
    LogisticModel,
    expit,
    logistic_fit,
    ols_fit,
    predict_proba,
    standardize,
)
from .synth import SynthParams, generate_fully_synthetic, overlay_semi_synthetic

__all__ = [
    "__version__",
    "BUILTIN_GRAPH_NAMES",
    "CausalDag",
    "ConditionReport",
    "RoleAssignment",
    "builtin_graph",
    "check_proximal_structure",
    "d_separated",
    "find_open_path",
    "format_edge_list",
    "parse_edge_list",
    "Dataset",
    "read_csv",
    "write_csv",
    "BootstrapError",
    "DegenerateProxyError",
    "StageOneWarning",
    "GateDecision",
    "OddsRatioResult",
    "crosstab_odds_ratio",
    "gamma_ci",
    "gamma_fit",
    "gamma_point",
    "gate",
    "PipelineConfig",
    "PipelineReport",
    "run_gotcha_bench",
    "run_pipeline",
    "run_table1_experiment",
    "AceEstimate",
    "ace_ci",
    "completeness_check",
    "estimate_ace_backdoor",
    "estimate_ace_proximal",
    "DiagnosticsReport",
    "ExternalProxy",
    "ThresholdProxy",
    "TrainedLogisticProxy",
    "load_external_predictions",
    "proxy_diagnostics",
    "train_logistic_proxy",
    "DesignMatrix",
    "LinearModel",
    "LogisticModel",
    "expit",
    "logistic_fit",
    "ols_fit",
    "predict_proba",
    "standardize",
    "SynthParams",
    "generate_fully_synthetic",
    "overlay_semi_synthetic",
]
