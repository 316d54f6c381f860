"""Conditional odds ratio between two binary proxies, CI, and the gate.

The association summary is the exponentiated proxy coefficient from an
unpenalized main-effects logistic regression of one proxy on the other
plus covariates (reference levels 0/0). Class rebalancing kicks in when
the target proxy's positivity leaves [0.2, 0.8]. Percentile bootstrap
over row resamples gives the interval; the gate passes only when the
interval sits strictly above 1 and strictly below the analyst's upper
bound.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import check_not_constant
from .errors import BootstrapError, DegenerateProxyError
from .regress import DesignMatrix, LogisticModel, class_weights, logistic_fit
from .seeding import seed_tuple

GateReason = str  # passed | ci_low_not_above_one | ci_high_exceeds_gamma_high | degenerate_proxy


@dataclass(frozen=True)
class OddsRatioResult:
    gamma_point: float
    ci_low: float
    ci_high: float
    n_boot: int
    n_nonconverged: int
    weighting_used: str

    def to_dict(self) -> dict:
        return {
            "gamma_point": self.gamma_point,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "n_boot": self.n_boot,
            "n_nonconverged": self.n_nonconverged,
            "weighting_used": self.weighting_used,
        }


@dataclass(frozen=True)
class GateDecision:
    verdict: str  # proceed | stop
    reason: GateReason
    gamma_high_used: float

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "gamma_high_used": self.gamma_high_used,
        }


def crosstab_odds_ratio(w, z) -> float:
    """Cross-product ratio of the 2x2 table; all four cells must be nonzero."""
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    n11 = float(np.sum((w == 1) & (z == 1)))
    n10 = float(np.sum((w == 1) & (z == 0)))
    n01 = float(np.sum((w == 0) & (z == 1)))
    n00 = float(np.sum((w == 0) & (z == 0)))
    if min(n11, n10, n01, n00) == 0:
        raise ValueError("2x2 table has an empty cell")
    return (n11 * n00) / (n10 * n01)


def choose_weighting(target: np.ndarray) -> str:
    """Rebalance classes when the regression target's positivity is extreme."""
    pos = float(np.mean(target))
    return "balanced" if (pos < 0.2 or pos > 0.8) else "none"


def _proxy_design(z: np.ndarray, c: dict[str, np.ndarray] | None) -> DesignMatrix:
    cols: dict[str, np.ndarray] = {"Z": z}
    if c:
        for name, col in c.items():
            cols[name] = np.asarray(col, dtype=float)
    return DesignMatrix.from_columns(cols)


@dataclass(frozen=True)
class GammaFit:
    """Point estimate plus the fit details callers may want to surface."""

    gamma: float
    weighting: str
    model: LogisticModel

    @property
    def flagged(self) -> bool:
        return self.model.separation_detected or not self.model.converged


def gamma_fit(w, z, c: dict[str, np.ndarray] | None = None) -> GammaFit:
    w = check_not_constant(np.asarray(w, dtype=float), "W")
    z = check_not_constant(np.asarray(z, dtype=float), "Z")
    if w.shape != z.shape:
        raise ValueError("proxy columns differ in length")
    weighting = choose_weighting(w)
    model = logistic_fit(_proxy_design(z, c), w, weighting=weighting)
    return GammaFit(float(np.exp(model.coefficients["Z"])), weighting, model)


def gamma_point(w, z, c: dict[str, np.ndarray] | None = None) -> float:
    """Conditional odds ratio point estimate (exp of the proxy coefficient).

    Under separation the coefficient is clamped, so the returned value is
    finite but astronomically large; use :func:`gamma_fit` to inspect the
    separation and convergence flags.
    """
    return gamma_fit(w, z, c).gamma


def _map_replicates(fn, n_boot: int, n_jobs: int) -> list:
    if n_jobs <= 1:
        return [fn(i) for i in range(n_boot)]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, range(n_boot)))


def gamma_ci(
    w,
    z,
    c: dict[str, np.ndarray] | None = None,
    n_boot: int = 200,
    seed: int | tuple[int, ...] = 0,
    n_jobs: int = 1,
) -> OddsRatioResult:
    """Point estimate plus 2.5/97.5 bootstrap percentile interval.

    Each replicate resamples rows with replacement, re-decides the class
    weighting, and refits. Replicate RNG streams derive from
    (seed, replicate index), so results do not depend on execution order
    or on ``n_jobs``. Replicates whose resampled proxies are constant are
    dropped; more than 10% dropped aborts. Separated or non-converged
    replicates still contribute their clamped estimate and are counted in
    ``n_nonconverged`` along with the dropped ones.
    """
    if n_boot < 2:
        raise ValueError("n_boot must be at least 2")
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    full = gamma_fit(w, z, c)
    n = w.shape[0]
    base = seed_tuple(seed)
    cmat = {k: np.asarray(v, dtype=float) for k, v in (c or {}).items()}

    def one(i: int):
        rng = np.random.default_rng(base + (i + 1,))
        idx = rng.integers(0, n, n)
        wr, zr = w[idx], z[idx]
        if wr.min() == wr.max() or zr.min() == zr.max():
            return None
        fit = gamma_fit(wr, zr, {k: v[idx] for k, v in cmat.items()})
        return fit.gamma, fit.flagged

    results = _map_replicates(one, n_boot, n_jobs)
    kept = [r[0] for r in results if r is not None]
    n_excluded = n_boot - len(kept)
    n_flagged = sum(1 for r in results if r is not None and r[1])
    if n_excluded > 0.1 * n_boot:
        raise BootstrapError(
            f"{n_excluded}/{n_boot} bootstrap replicates degenerate; "
            "sample too small or proxies too unbalanced"
        )
    lo, hi = np.percentile(kept, [2.5, 97.5])
    return OddsRatioResult(
        gamma_point=full.gamma,
        ci_low=float(lo),
        ci_high=float(hi),
        n_boot=n_boot,
        n_nonconverged=n_excluded + n_flagged,
        weighting_used=full.weighting,
    )


def gate(result: OddsRatioResult, gamma_high: float) -> GateDecision:
    """Falsification verdict: proceed only when the CI lies in (1, gamma_high).

    The lower bound is checked first, so an interval violating both
    reports the lower-bound reason.
    """
    if not gamma_high > 1.0:
        raise ValueError("gamma_high must exceed 1")
    if not result.ci_low > 1.0:
        return GateDecision("stop", "ci_low_not_above_one", gamma_high)
    if not result.ci_high < gamma_high:
        return GateDecision("stop", "ci_high_exceeds_gamma_high", gamma_high)
    return GateDecision("proceed", "passed", gamma_high)


def degenerate_gate(gamma_high: float) -> GateDecision:
    """Stop verdict for proxies rejected before any odds ratio is computable."""
    return GateDecision("stop", "degenerate_proxy", gamma_high)


__all__ = [
    "OddsRatioResult",
    "GateDecision",
    "GammaFit",
    "crosstab_odds_ratio",
    "choose_weighting",
    "gamma_fit",
    "gamma_point",
    "gamma_ci",
    "gate",
    "degenerate_gate",
    "DegenerateProxyError",
    "class_weights",
]
