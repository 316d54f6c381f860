"""Average-causal-effect estimation: two-stage proximal and backdoor baselines.

The proximal estimator splits the sample 50/50, fits an unpenalized
logistic regression of the treatment-side proxy on treatment, the
outcome-side proxy, and covariates on the first half, predicts proxy
probabilities on the second half, and reads the effect off the treatment
coefficient of a least-squares outcome regression on that half. The
backdoor baselines regress the outcome on treatment plus an adjustment
set over the full sample; with everything linear that coefficient is the
adjusted contrast.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import Dataset, check_not_constant
from .errors import BootstrapError, StageOneWarning
from .oddsratio import _map_replicates, choose_weighting
from .regress import DesignMatrix, logistic_fit, ols_fit, predict_proba
from .seeding import seed_tuple

METHODS = ("proximal", "backdoor_proxy", "backdoor_oracle")


@dataclass(frozen=True)
class AceEstimate:
    point: float
    ci_low: float
    ci_high: float
    method: str
    n_boot: int
    split_seed: int | tuple[int, ...]
    n_excluded: int = 0

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "method": self.method,
            "n_boot": self.n_boot,
            "split_seed": list(seed_tuple(self.split_seed)),
            "n_excluded": self.n_excluded,
        }


def _design(cols: dict[str, np.ndarray]) -> DesignMatrix:
    return DesignMatrix.from_columns(cols)


def _two_stage(a, y, cov: dict[str, np.ndarray], w, z, idx1, idx2,
               stage1: str = "logistic"):
    """Index-driven two-stage core; returns (estimate, stage1_flagged)."""
    stage1_cols = {"A": a[idx1], "Z": z[idx1]}
    stage1_cols.update({k: v[idx1] for k, v in cov.items()})
    x1 = _design(stage1_cols)
    pred_cols = {"A": a[idx2], "Z": z[idx2]}
    pred_cols.update({k: v[idx2] for k, v in cov.items()})
    x1_pred = _design(pred_cols)

    if stage1 == "logistic":
        model = logistic_fit(x1, w[idx1], weighting=choose_weighting(w[idx1]))
        w_hat = predict_proba(model, x1_pred)
        flagged = model.separation_detected or not model.converged
    elif stage1 == "linear":
        model = ols_fit(x1, w[idx1])
        w_hat = model.predict(x1_pred)
        flagged = False
    else:
        raise ValueError(f"unknown stage1 variant {stage1!r}")

    stage2_cols = {"A": a[idx2], "W_hat": w_hat}
    stage2_cols.update({k: v[idx2] for k, v in cov.items()})
    outcome = ols_fit(_design(stage2_cols), y[idx2])
    return outcome.coefficients["A"], flagged


def _split_indices(n: int, rng: np.random.Generator, swap_halves: bool):
    perm = rng.permutation(n)
    half = n // 2
    idx1, idx2 = perm[:half], perm[half:]
    return (idx2, idx1) if swap_halves else (idx1, idx2)


def _proximal_arrays(a, y, cov, w, z, rng, stage1, swap_halves):
    idx1, idx2 = _split_indices(a.shape[0], rng, swap_halves)
    return _two_stage(a, y, cov, w, z, idx1, idx2, stage1)


def estimate_ace_proximal(
    data: Dataset,
    seed: int | tuple[int, ...] = 0,
    stage1: str = "logistic",
    swap_halves: bool = False,
) -> float:
    """Two-stage proximal point estimate of the average causal effect.

    ``stage1`` selects the proxy regression family: "logistic" is the
    operational default; "linear" replaces it with least squares for
    callers that want a fully linear first stage. ``swap_halves`` is a
    diagnostic knob exchanging the roles of the two sample halves.
    Stage-1 separation or non-convergence is surfaced as a
    :class:`StageOneWarning`, not an error.
    """
    if data.w is None or data.z is None:
        raise ValueError("dataset needs both proxy columns attached")
    if data.n < 200:
        raise ValueError("need at least 200 rows for a 50/50 split")
    check_not_constant(data.w, "W")
    check_not_constant(data.z, "Z")
    rng = np.random.default_rng(seed_tuple(seed))
    est, flagged = _proximal_arrays(
        data.a, data.y, data.covariates(), data.w, data.z, rng, stage1, swap_halves
    )
    if flagged:
        warnings.warn(
            "stage-1 proxy regression separated or failed to converge; "
            "estimate may degenerate to direct proxy adjustment",
            StageOneWarning,
            stacklevel=2,
        )
    return float(est)


def estimate_ace_backdoor(data: Dataset, adjust) -> float:
    """Treatment coefficient of the outcome regression on A plus ``adjust``."""
    cols = {"A": data.a}
    for name in adjust:
        cols[name] = data.column(name)
    model = ols_fit(_design(cols), data.y)
    return float(model.coefficients["A"])


def completeness_check(w, z, u_cardinality: int) -> bool:
    """Sufficient relevance condition: proxies vary at least as much as U."""
    w = np.asarray(w)
    z = np.asarray(z)
    return min(np.unique(z).size, np.unique(w).size) >= u_cardinality


def ace_ci(
    data: Dataset,
    method: str = "proximal",
    adjust=None,
    n_boot: int = 200,
    seed: int | tuple[int, ...] = 0,
    stage1: str = "logistic",
    n_jobs: int = 1,
) -> AceEstimate:
    """Bootstrap percentile interval around the chosen estimator.

    Every replicate resamples rows with replacement and re-runs the whole
    pipeline, including a fresh 50/50 split for the proximal method.
    Replicate RNG streams derive from (seed, replicate index); replicates
    with a degenerate resampled proxy or single-class stage-1 target are
    dropped, and more than 10% dropped aborts.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if method == "proximal":
        if data.w is None or data.z is None:
            raise ValueError("proximal method needs proxy columns")
        if adjust is not None:
            raise ValueError("adjust only applies to backdoor methods")
    elif adjust is None:
        raise ValueError("backdoor methods need an adjustment column list")

    base = seed_tuple(seed)
    n = data.n
    a, y, cov = data.a, data.y, data.covariates()
    w, z = data.w, data.z

    def point_estimate() -> float:
        if method == "proximal":
            rng = np.random.default_rng(base + (0,))
            est, _ = _proximal_arrays(a, y, cov, w, z, rng, stage1, False)
            return float(est)
        return estimate_ace_backdoor(data, adjust)

    def one(i: int):
        rng = np.random.default_rng(base + (i + 1,))
        idx = rng.integers(0, n, n)
        cov_r = {k: v[idx] for k, v in cov.items()}
        if method == "proximal":
            wr, zr = w[idx], z[idx]
            if wr.min() == wr.max() or zr.min() == zr.max():
                return None
            try:
                est, _ = _proximal_arrays(a[idx], y[idx], cov_r, wr, zr,
                                          rng, stage1, False)
            except ValueError:
                return None  # e.g. single-class stage-1 target in a half
            return float(est)
        cols = {"A": a[idx]}
        for name in adjust:
            cols[name] = data.column(name)[idx]
        try:
            model = ols_fit(_design(cols), y[idx])
        except ValueError:
            return None
        return float(model.coefficients["A"])

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StageOneWarning)
        results = _map_replicates(one, n_boot, n_jobs)
    kept = [r for r in results if r is not None]
    n_excluded = n_boot - len(kept)
    if n_excluded > 0.1 * n_boot:
        raise BootstrapError(
            f"{n_excluded}/{n_boot} bootstrap replicates failed"
        )
    lo, hi = np.percentile(kept, [2.5, 97.5])
    return AceEstimate(
        point=point_estimate(),
        ci_low=float(lo),
        ci_high=float(hi),
        method=method,
        n_boot=n_boot,
        split_seed=seed,
        n_excluded=n_excluded,
    )
