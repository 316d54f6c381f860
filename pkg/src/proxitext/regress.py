"""Numerical core: OLS, unpenalized weighted logistic regression, helpers.

Logistic fitting is damped Newton (IRLS with step-halving line search),
no regularization, intercept always included and never penalized.
Separation is detected by coefficient blow-up past ``COEF_CLAMP`` and
reported rather than raised: the fit survives with clamped coefficients
so downstream odds ratios stay finite (and astronomically large, which is
the signal the falsification gate relies on).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import irls

MAX_ITER = 100
SCORE_TOL = 1e-8
STEP_TOL = 1e-10
COEF_CLAMP = 30.0

# predict_proba keeps probabilities inside the open interval (0, 1) even
# when clamped coefficients push the linear score past float saturation
_PROB_EPS = 1e-15


def expit(x):
    """Numerically stable logistic function, elementwise."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def standardize(values) -> np.ndarray:
    """Center and scale a column to mean 0, population stddev 1.

    Raises ValueError on a constant column (fewer than two distinct values).
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise ValueError("standardize expects a single column")
    if not np.all(np.isfinite(x)):
        raise ValueError("column contains non-finite values")
    sd = x.std()  # population stddev (ddof=0)
    if sd == 0.0 or np.unique(x).size < 2:
        raise ValueError("cannot standardize a constant column")
    return (x - x.mean()) / sd


@dataclass(frozen=True)
class DesignMatrix:
    """Named feature columns; the intercept is added by the fitters."""

    names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError("design values must be a 2-D array")
        if vals.shape[1] != len(self.names):
            raise ValueError("column count does not match names")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate feature names")
        if not np.all(np.isfinite(vals)):
            raise ValueError("design contains non-finite values")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "names", tuple(self.names))

    @classmethod
    def from_columns(cls, columns: dict[str, np.ndarray]) -> "DesignMatrix":
        names = tuple(columns)
        if not names:
            raise ValueError("need at least one feature column")
        return cls(names, np.column_stack([columns[n] for n in names]))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class LinearModel:
    intercept: float
    coefficients: dict[str, float]

    def predict(self, x: DesignMatrix) -> np.ndarray:
        _check_names(self, x)
        coef = np.array([self.coefficients[n] for n in x.names])
        return self.intercept + x.values @ coef


@dataclass(frozen=True)
class LogisticModel:
    intercept: float
    coefficients: dict[str, float]
    converged: bool
    separation_detected: bool


def _check_names(model, x: DesignMatrix) -> None:
    if tuple(model.coefficients) != x.names:
        raise ValueError(
            f"feature names {x.names} do not match model {tuple(model.coefficients)}"
        )


def _augment(x: DesignMatrix) -> np.ndarray:
    return np.column_stack([np.ones(x.n_rows), x.values])


def ols_fit(x: DesignMatrix, y) -> LinearModel:
    """Least squares fit of y on an intercept plus the design columns."""
    y = np.asarray(y, dtype=float)
    if y.shape != (x.n_rows,):
        raise ValueError("y length does not match design")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite values")
    if x.n_rows < x.n_features + 1:
        raise ValueError("need at least p + 1 rows")
    xa = _augment(x)
    beta, _, rank, _ = np.linalg.lstsq(xa, y, rcond=None)
    if rank < xa.shape[1]:
        raise ValueError("rank-deficient design")
    return LinearModel(float(beta[0]), dict(zip(x.names, beta[1:].tolist())))


def class_weights(y: np.ndarray, weighting: str) -> np.ndarray:
    """Per-row weights: all-ones, or n / (2 * n_class) under ``balanced``."""
    n = y.size
    if weighting == "none":
        return np.ones(n)
    if weighting == "balanced":
        n1 = y.sum()
        return np.where(y == 1.0, n / (2.0 * n1), n / (2.0 * (n - n1)))
    raise ValueError(f"unknown weighting {weighting!r}")


def logistic_fit(x: DesignMatrix, y, weighting: str = "none") -> LogisticModel:
    """Unpenalized logistic regression of a 0/1 column on the design.

    ``weighting="balanced"`` reweights each class to total weight n/2,
    mirroring inverse-class-frequency weighting. Callers decide when to
    trigger it (the pipeline rule keys on the positivity of the target).
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.shape != (x.n_rows,):
        raise ValueError("y length does not match design")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("y must be binary 0/1")
    if y.min() == y.max():
        raise ValueError("y contains a single class")
    if x.n_rows < x.n_features + 1:
        raise ValueError("need at least p + 1 rows")
    w = class_weights(y, weighting)
    beta, converged, separated, _ = irls(
        _augment(x), y, w, MAX_ITER, SCORE_TOL, STEP_TOL, COEF_CLAMP
    )
    return LogisticModel(
        intercept=float(beta[0]),
        coefficients=dict(zip(x.names, beta[1:].tolist())),
        converged=bool(converged),
        separation_detected=bool(separated),
    )


def predict_proba(model: LogisticModel, x: DesignMatrix) -> np.ndarray:
    """Predicted probabilities, clipped into the open interval (0, 1)."""
    _check_names(model, x)
    coef = np.array([model.coefficients[n] for n in x.names])
    p = expit(model.intercept + x.values @ coef)
    return np.clip(p, _PROB_EPS, 1.0 - _PROB_EPS)
