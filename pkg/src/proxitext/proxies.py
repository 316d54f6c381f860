"""Binary proxy construction and oracle-based diagnostics.

Three proxy sources are supported: a logistic classifier trained against
the oracle column on averaged feature blocks (the stand-in for a learned
zero-shot model), a fixed strict-threshold rule on a single feature, and
externally computed 0/1 predictions ingested from file. Predictions are
hard labels; the diagnostics compare them against the oracle and report
the conditional odds ratios that indicate proxy relevance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .data import Dataset, as_binary, check_not_constant
from .errors import DegenerateProxyError
from .oddsratio import gamma_point
from .regress import DesignMatrix, LogisticModel, logistic_fit, predict_proba

HARD_LABEL_CUTOFF = 0.5


@dataclass(frozen=True)
class TrainedLogisticProxy:
    model: LogisticModel
    train_blocks: tuple[str, str]


@dataclass(frozen=True)
class ThresholdProxy:
    feature: str
    cutoff: float

    def __post_init__(self):
        if not np.isfinite(self.cutoff):
            raise ValueError("threshold cutoff must be finite")


@dataclass(frozen=True)
class ExternalProxy:
    column: str


ProxyModel = TrainedLogisticProxy | ThresholdProxy | ExternalProxy


def _block_design(data: Dataset, block: str) -> DesignMatrix:
    if block not in data.blocks:
        raise KeyError(f"dataset has no feature block {block!r}")
    return DesignMatrix(data.block_features, data.blocks[block])


def train_logistic_proxy(train_data: Dataset, block_avg: tuple[str, str]) -> TrainedLogisticProxy:
    """Fit a logistic classifier for the oracle on two averaged blocks.

    Averaging the two training realizations halves the feature noise the
    classifier sees; the returned model is then applied to single
    inference-time blocks via :func:`predict`.
    """
    if train_data.u is None:
        raise ValueError("training data needs the oracle column")
    b1, b2 = block_avg
    x1 = _block_design(train_data, b1)
    x2 = _block_design(train_data, b2)
    averaged = DesignMatrix(train_data.block_features, (x1.values + x2.values) / 2.0)
    model = logistic_fit(averaged, train_data.u)
    return TrainedLogisticProxy(model=model, train_blocks=(b1, b2))


def predict(model: ProxyModel, data: Dataset, block: str | None = None) -> np.ndarray:
    """Binary predictions for each row of ``data``.

    Trained models threshold the predicted probability at 0.5; threshold
    rules compare the named feature strictly against the cutoff (ties go
    to 0); external proxies return their stored column verbatim.
    """
    if isinstance(model, TrainedLogisticProxy):
        if block is None:
            raise ValueError("trained proxy needs a feature block name")
        probs = predict_proba(model.model, _block_design(data, block))
        return (probs > HARD_LABEL_CUTOFF).astype(float)
    if isinstance(model, ThresholdProxy):
        if block is None:
            raise ValueError("threshold proxy needs a feature block name")
        design = _block_design(data, block)
        if model.feature not in design.names:
            raise KeyError(f"block {block!r} has no feature {model.feature!r}")
        col = design.values[:, design.names.index(model.feature)]
        return (col > model.cutoff).astype(float)
    if isinstance(model, ExternalProxy):
        return as_binary(data.column(model.column), model.column).copy()
    raise TypeError(f"unknown proxy model {type(model).__name__}")


def load_external_predictions(
    path,
    w_col: str,
    z_col: str,
    expected_n: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Read pre-binarized prediction columns from a CSV file.

    Values must be exactly 0/1; constant columns are rejected as
    degenerate (a proxy with no variation cannot carry confounder
    signal). ``expected_n`` guards the row count against the analysis
    dataset.
    """
    frame = pd.read_csv(path)
    for col in (w_col, z_col):
        if col not in frame.columns:
            raise ValueError(f"prediction file lacks column {col!r}")
    if expected_n is not None and len(frame) != expected_n:
        raise ValueError(
            f"prediction file has {len(frame)} rows, expected {expected_n}"
        )
    w = check_not_constant(as_binary(frame[w_col].to_numpy(float), w_col), w_col)
    z = check_not_constant(as_binary(frame[z_col].to_numpy(float), z_col), z_col)
    return w, z


@dataclass(frozen=True)
class DiagnosticsReport:
    """Oracle-referenced quality metrics for an attached proxy pair."""

    accuracy_w: float
    precision_w: float
    recall_w: float
    accuracy_z: float
    precision_z: float
    recall_z: float
    positivity_w: float
    positivity_z: float
    agreement: float
    gamma_wu_c: float
    gamma_zu_c: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _against_oracle(pred: np.ndarray, oracle: np.ndarray) -> tuple[float, float, float]:
    tp = float(np.sum((pred == 1) & (oracle == 1)))
    accuracy = float(np.mean(pred == oracle))
    precision = tp / float(np.sum(pred == 1))
    recall = tp / float(np.sum(oracle == 1))
    return accuracy, precision, recall


def proxy_diagnostics(data: Dataset) -> DiagnosticsReport:
    """Accuracy/precision/recall vs the oracle, positivity, agreement,
    and the proxy-oracle conditional odds ratios."""
    if data.u is None:
        raise ValueError("diagnostics need the oracle column")
    if data.w is None or data.z is None:
        raise ValueError("diagnostics need both proxy columns")
    w = check_not_constant(data.w, "W")
    z = check_not_constant(data.z, "Z")
    u = check_not_constant(data.u, "U")
    cov = data.covariates()
    acc_w, prec_w, rec_w = _against_oracle(w, u)
    acc_z, prec_z, rec_z = _against_oracle(z, u)
    return DiagnosticsReport(
        accuracy_w=acc_w,
        precision_w=prec_w,
        recall_w=rec_w,
        accuracy_z=acc_z,
        precision_z=prec_z,
        recall_z=rec_z,
        positivity_w=float(np.mean(w)),
        positivity_z=float(np.mean(z)),
        agreement=float(np.mean(w == z)),
        gamma_wu_c=gamma_point(w, u, cov),
        gamma_zu_c=gamma_point(z, u, cov),
    )


__all__ = [
    "TrainedLogisticProxy",
    "ThresholdProxy",
    "ExternalProxy",
    "ProxyModel",
    "train_logistic_proxy",
    "predict",
    "load_external_predictions",
    "DiagnosticsReport",
    "proxy_diagnostics",
    "DegenerateProxyError",
    "HARD_LABEL_CUTOFF",
]
