"""End-to-end orchestration: falsify-then-estimate runs and benchmarks.

``run_pipeline`` wires the stages together: load or generate data, attach
the two proxies from their configured sources, compute the conditional
odds ratio with its bootstrap interval, apply the gate, and only on a
proceed verdict estimate the causal effect. A stop verdict structurally
omits the effect estimate from the report.

``run_table1_experiment`` and ``run_gotcha_bench`` drive the synthetic
benchmark configurations: one or two proxy models, applied to distinct
or deliberately shared feature realizations, against backdoor baselines.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from contextlib import contextmanager
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from . import __version__
from .dag import RoleAssignment, check_proximal_structure, parse_edge_list
from .data import Dataset, as_binary, check_not_constant, read_csv
from .errors import DegenerateProxyError, StageOneWarning
from .oddsratio import GateDecision, OddsRatioResult, degenerate_gate, gamma_ci, gate
from .proxies import (
    ExternalProxy,
    ThresholdProxy,
    TrainedLogisticProxy,
    predict,
    proxy_diagnostics,
    train_logistic_proxy,
)
from .proximal import AceEstimate, ace_ci, estimate_ace_backdoor, estimate_ace_proximal
from .synth import SynthParams, generate_fully_synthetic

REPORT_SCHEMA = "proxitext/pipeline-report/v1"
TABLE_SCHEMA = "proxitext/bench-table/v1"

DEFAULT_TRAIN_BLOCKS = ("train1", "train2")
THRESHOLD_FEATURE = "X1"
THRESHOLD_CUTOFF = 1.1

# Benchmark configurations: (proxy-model for W, block for W, model for Z,
# block for Z). "lr" is the trained logistic stand-in, "thr" the fixed
# threshold rule. Shared-text rows deliberately reuse one realization.
TABLE1_CONFIGS: dict[str, tuple[str, str, str, str]] = {
    "one-model": ("lr", "inf2", "lr", "inf1"),
    "one-model-same-text": ("lr", "inf1", "lr", "inf1"),
    "two-model": ("lr", "inf2", "thr", "inf1"),
    "two-model-same-text": ("lr", "inf1", "thr", "inf1"),
}

# The replication target: valid designs pass the gate, shared-text fails.
EXPECTED_TABLE1_VERDICTS = {
    "one-model": "proceed",
    "one-model-same-text": "stop",
    "two-model": "proceed",
    "two-model-same-text": "stop",
}


class PipelineStageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineStageError:
        raise
    except Exception as exc:
        raise PipelineStageError(name, exc) from exc


@dataclass(frozen=True)
class ProxySource:
    """Where a proxy column comes from; parsed from a compact spec string.

    Grammar: ``column:NAME`` | ``external:PATH:COLUMN`` |
    ``logistic:BLOCK`` | ``threshold:BLOCK:FEATURE:CUTOFF``.
    """

    kind: str
    column: str | None = None
    path: str | None = None
    block: str | None = None
    feature: str | None = None
    cutoff: float | None = None

    @classmethod
    def parse(cls, spec: str) -> "ProxySource":
        parts = spec.split(":")
        kind = parts[0]
        if kind == "column" and len(parts) == 2:
            return cls("column", column=parts[1])
        if kind == "external" and len(parts) == 3:
            return cls("external", path=parts[1], column=parts[2])
        if kind == "logistic" and len(parts) == 2:
            return cls("logistic", block=parts[1])
        if kind == "threshold" and len(parts) == 4:
            return cls("threshold", block=parts[1], feature=parts[2],
                       cutoff=float(parts[3]))
        raise ValueError(f"cannot parse proxy source {spec!r}")

    def identity(self) -> tuple:
        """Key for the same-source check: block-based proxies collide when
        they read the same realization, column/file proxies when they read
        the same column."""
        if self.kind in ("logistic", "threshold"):
            return ("block", self.block)
        if self.kind == "column":
            return ("column", self.column)
        return ("external", self.path, self.column)

    def describe(self) -> str:
        if self.kind == "column":
            return f"column:{self.column}"
        if self.kind == "external":
            return f"external:{self.path}:{self.column}"
        if self.kind == "logistic":
            return f"logistic:{self.block}"
        return f"threshold:{self.block}:{self.feature}:{self.cutoff}"


@dataclass(frozen=True)
class PipelineConfig:
    w_source: str
    z_source: str
    data_csv: str | None = None
    dgp: str | None = None
    n: int = 10_000
    a_col: str = "A"
    y_col: str = "Y"
    u_col: str | None = None
    covariates: tuple[str, ...] | None = None
    graph_file: str | None = None
    graph_roles: dict[str, object] | None = None
    allow_same_source: bool = False
    gamma_high: float = 2.0
    n_boot: int = 200
    seed: int = 0
    stage1: str = "logistic"
    n_jobs: int = 1
    out: str | None = None

    def __post_init__(self):
        if (self.data_csv is None) == (self.dgp is None):
            raise ValueError("config needs exactly one data source (csv or dgp)")
        if self.dgp is not None and self.dgp != "full":
            raise ValueError("only the fully synthetic dgp runs in-pipeline; "
                             "generate semi-synthetic data via `simulate` first")
        if self.gamma_high <= 1.0:
            raise ValueError("gamma_high must exceed 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["covariates"] = list(self.covariates) if self.covariates else None
        return d

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class PipelineReport:
    provenance: dict
    condition_report: dict | None
    odds_ratio: dict | None
    gate: dict
    ace: dict | None
    diagnostics: dict | None
    schema: str = REPORT_SCHEMA

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "provenance": self.provenance,
            "condition_report": self.condition_report,
            "odds_ratio": self.odds_ratio,
            "gate": self.gate,
            "ace": self.ace,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @property
    def verdict(self) -> str:
        return self.gate["verdict"]


def _load_data(config: PipelineConfig) -> Dataset:
    if config.data_csv is not None:
        return read_csv(
            config.data_csv,
            a_col=config.a_col,
            y_col=config.y_col,
            u_col=config.u_col,
            covariates=config.covariates,
        )
    return generate_fully_synthetic(SynthParams(n=config.n, seed=(config.seed, 0)))


def _load_external_column(path: str, column: str, expected_n: int) -> np.ndarray:
    frame = pd.read_csv(path)
    if column not in frame.columns:
        raise ValueError(f"prediction file lacks column {column!r}")
    if len(frame) != expected_n:
        raise ValueError(f"prediction file has {len(frame)} rows, expected {expected_n}")
    col = as_binary(frame[column].to_numpy(float), column)
    return check_not_constant(col, column)


def _resolve_proxy(source: ProxySource, data: Dataset,
                   trained: TrainedLogisticProxy | None,
                   expected_n: int) -> np.ndarray:
    if source.kind == "column":
        return predict(ExternalProxy(source.column), data)
    if source.kind == "external":
        return _load_external_column(source.path, source.column, expected_n)
    if source.kind == "logistic":
        assert trained is not None
        return predict(trained, data, source.block)
    return predict(ThresholdProxy(source.feature, source.cutoff), data, source.block)


def _check_structure(config: PipelineConfig) -> dict | None:
    if config.graph_file is None:
        return None
    with open(config.graph_file, encoding="utf-8") as fh:
        g = parse_edge_list(fh.read())
    roles_spec = config.graph_roles or {}
    roles = RoleAssignment(
        treatment=roles_spec.get("treatment", "A"),
        outcome=roles_spec.get("outcome", "Y"),
        unmeasured=roles_spec.get("unmeasured", "U"),
        observed_covariates=tuple(roles_spec.get("covariates", ("C",))),
        proxy_w=roles_spec.get("proxy_w", "W"),
        proxy_z=roles_spec.get("proxy_z", "Z"),
    )
    return check_proximal_structure(g, roles).to_dict()


def run_pipeline(config: PipelineConfig) -> PipelineReport:
    """Execute the full falsify-then-estimate pipeline for one config."""
    provenance = {
        "seed": config.seed,
        "config_hash": config.hash(),
        "config": config.to_dict(),
        "package_version": __version__,
        "numpy_version": np.__version__,
    }

    with _stage("structure"):
        condition_report = _check_structure(config)

    with _stage("data"):
        data = _load_data(config)

    with _stage("proxies"):
        w_src = ProxySource.parse(config.w_source)
        z_src = ProxySource.parse(config.z_source)
        if w_src.identity() == z_src.identity() and not config.allow_same_source:
            raise ValueError(
                f"W and Z read the same source {w_src.describe()!r}; "
                "pass allow_same_source to reproduce the shared-text pitfall"
            )
        trained = None
        if "logistic" in (w_src.kind, z_src.kind):
            trained = train_logistic_proxy(data, DEFAULT_TRAIN_BLOCKS)
        try:
            w = _resolve_proxy(w_src, data, trained, data.n)
            z = _resolve_proxy(z_src, data, trained, data.n)
            data = data.with_proxies(w=w, z=z)
        except DegenerateProxyError:
            return _write_report(PipelineReport(
                provenance=provenance,
                condition_report=condition_report,
                odds_ratio=None,
                gate=degenerate_gate(config.gamma_high).to_dict(),
                ace=None,
                diagnostics=None,
            ), config)

    with _stage("odds-ratio"):
        orr = gamma_ci(
            data.w, data.z, data.covariates(),
            n_boot=config.n_boot, seed=(config.seed, 1), n_jobs=config.n_jobs,
        )

    with _stage("gate"):
        decision = gate(orr, config.gamma_high)

    ace: AceEstimate | None = None
    if decision.verdict == "proceed":
        with _stage("estimate"):
            ace = ace_ci(
                data, method="proximal", n_boot=config.n_boot,
                seed=(config.seed, 2), stage1=config.stage1, n_jobs=config.n_jobs,
            )

    diagnostics = None
    if data.u is not None:
        with _stage("diagnostics"):
            diagnostics = proxy_diagnostics(data).to_dict()

    return _write_report(PipelineReport(
        provenance=provenance,
        condition_report=condition_report,
        odds_ratio=orr.to_dict(),
        gate=decision.to_dict(),
        ace=ace.to_dict() if ace is not None else None,
        diagnostics=diagnostics,
    ), config)


def _write_report(report: PipelineReport, config: PipelineConfig) -> PipelineReport:
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    return report


@dataclass(frozen=True)
class Table1Row:
    config: str
    odds_ratio: OddsRatioResult
    gate: GateDecision
    ace: AceEstimate
    bias: float
    covers_truth: bool

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "odds_ratio": self.odds_ratio.to_dict(),
            "gate": self.gate.to_dict(),
            "ace": self.ace.to_dict(),
            "bias": self.bias,
            "covers_truth": self.covers_truth,
        }


def _table1_proxy_columns(data: Dataset, trained: TrainedLogisticProxy):
    threshold = ThresholdProxy(THRESHOLD_FEATURE, THRESHOLD_CUTOFF)
    models = {"lr": trained, "thr": threshold}
    out: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for name, (w_model, w_block, z_model, z_block) in TABLE1_CONFIGS.items():
        w = predict(models[w_model], data, w_block)
        z = predict(models[z_model], data, z_block)
        out[name] = (w, z)
    return out


def run_table1_experiment(
    seed: int,
    n: int = 10_000,
    n_boot: int = 200,
    n_jobs: int = 1,
    true_ace: float = 1.3,
) -> list[Table1Row]:
    """One seeded pass over the four synthetic benchmark configurations.

    Emits gate verdicts alongside effect estimates for every row, shared-
    text rows included: the bench is a diagnostic table, unlike
    :func:`run_pipeline`, which refuses to estimate after a stop verdict.
    """
    if n < 1000:
        raise ValueError("benchmark needs n >= 1000")
    params = SynthParams(n=n, seed=(seed, 0), true_ace=true_ace)
    data = generate_fully_synthetic(params)
    trained = train_logistic_proxy(data, DEFAULT_TRAIN_BLOCKS)
    proxies = _table1_proxy_columns(data, trained)

    rows = []
    for idx, name in enumerate(TABLE1_CONFIGS):
        w, z = proxies[name]
        orr = gamma_ci(w, z, data.covariates(),
                       n_boot=n_boot, seed=(seed, 1, idx), n_jobs=n_jobs)
        decision = gate(orr, gamma_high=2.0)
        with_proxies = data.with_proxies(w=w, z=z)
        ace = ace_ci(with_proxies, method="proximal",
                     n_boot=n_boot, seed=(seed, 2, idx), n_jobs=n_jobs)
        rows.append(Table1Row(
            config=name,
            odds_ratio=orr,
            gate=decision,
            ace=ace,
            bias=ace.point - true_ace,
            covers_truth=bool(ace.ci_low <= true_ace <= ace.ci_high),
        ))
    return rows


@dataclass(frozen=True)
class GotchaRow:
    method: str
    estimate: float
    bias: float
    stage1_flagged: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def run_gotcha_bench(seed: int, n: int = 100_000,
                     true_ace: float = 1.3) -> list[GotchaRow]:
    """Side-by-side biases: backdoor with a proxy, backdoor with the oracle,
    proximal with distinct realizations, proximal with a shared one."""
    if n < 1000:
        raise ValueError("benchmark needs n >= 1000")
    params = SynthParams(n=n, seed=(seed, 0), true_ace=true_ace)
    data = generate_fully_synthetic(params)
    trained = train_logistic_proxy(data, DEFAULT_TRAIN_BLOCKS)
    w_valid = predict(trained, data, "inf2")
    z_valid = predict(trained, data, "inf1")
    shared = predict(trained, data, "inf1")

    valid = data.with_proxies(w=w_valid, z=z_valid)
    same = data.with_proxies(w=shared, z=shared)

    est_proxy = estimate_ace_backdoor(valid, ["W", "C"])
    est_oracle = estimate_ace_backdoor(valid, ["U", "C"])
    rows = [
        GotchaRow("backdoor_proxy", est_proxy, est_proxy - true_ace),
        GotchaRow("backdoor_oracle", est_oracle, est_oracle - true_ace),
    ]
    for method, ds, tag in (("proximal_valid", valid, (seed, 1)),
                            ("proximal_same_text", same, (seed, 2))):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", StageOneWarning)
            est = estimate_ace_proximal(ds, seed=tag)
        flagged = any(issubclass(c.category, StageOneWarning) for c in caught)
        rows.append(GotchaRow(method, est, est - true_ace, stage1_flagged=flagged))
    return rows


def table_to_json(rows, seed: int, extra: dict | None = None) -> dict:
    out = {
        "schema": TABLE_SCHEMA,
        "seed": seed,
        "rows": [r.to_dict() for r in rows],
    }
    if extra:
        out.update(extra)
    return out
