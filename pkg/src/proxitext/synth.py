"""Seeded data-generating processes for the synthetic experiments.

Randomness contract
-------------------
All draws reduce to 53-bit integer draws from numpy's PCG64 bit generator.
Uniforms are midpoint-offset, ``(k + 0.5) / 2**53`` with ``k`` drawn from
``integers(0, 2**53)``, so they live strictly inside (0, 1). Gaussians are
produced by the inverse-CDF method (``scipy.special.ndtri``) applied to
those uniforms; Bernoulli draws compare them against the probability.
This keeps equal seeds bit-identical across platforms and refactors, as
long as the documented draw order below is preserved.

Fully synthetic draw order, given the seed: the latent binary confounder,
the observed covariate, then the four feature blocks in the order train1,
train2, inf1, inf2 (within a block: the four feature noises in index
order), then the treatment uniforms, then the outcome noise.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np
from scipy.special import ndtri

from .data import Dataset
from .regress import expit
from .seeding import seed_tuple

FEATURE_NAMES = ("X1", "X2", "X3", "X4")
_TWO53 = float(2**53)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed_tuple(seed))


def _uniform_open(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.integers(0, 2**53, size=n).astype(np.float64) + 0.5) / _TWO53


def _normal(rng: np.random.Generator, n: int) -> np.ndarray:
    return ndtri(_uniform_open(rng, n))


def _bernoulli(rng: np.random.Generator, p, n: int) -> np.ndarray:
    return (_uniform_open(rng, n) < p).astype(np.float64)


@dataclass(frozen=True)
class SynthParams:
    """Structural-equation coefficients for the fully synthetic generator.

    Defaults reproduce the benchmark configuration: a binary confounder
    with prevalence 0.48, one standard-normal covariate feeding every
    feature with weight 3, four noisy feature views of the confounder
    (one exponentiated, one with square/cubic terms), a logistic
    treatment equation, and a linear outcome with true effect 1.3.
    """

    n: int = 10_000
    seed: int | tuple[int, ...] = 0
    true_ace: float = 1.3
    u_prob: float = 0.48
    x1_u: float = 1.95
    x2_u: float = 1.0
    x3_u: float = 1.25
    x4_u: float = 1.0
    x_c: float = 3.0
    x4_sq: float = 1.0
    x4_cu: float = 0.5
    a_u: float = 0.8
    a_c: float = 1.0
    a_bias: float = -0.3
    y_u: float = 0.8
    y_c: float = 1.0

    def __post_init__(self):
        if self.n < 100:
            raise ValueError("n must be at least 100")
        if not 0.0 < self.u_prob < 1.0:
            raise ValueError("u_prob must lie in (0, 1)")
        for f in fields(self):
            if f.name in ("n", "seed"):
                continue
            if not np.isfinite(getattr(self, f.name)):
                raise ValueError(f"coefficient {f.name} must be finite")


def _feature_block(rng, u, c, p: SynthParams) -> np.ndarray:
    n = u.shape[0]
    x1 = _normal(rng, n) + p.x1_u * u + p.x_c * c
    x2 = _normal(rng, n) + np.exp(x1) + p.x2_u * u + p.x_c * c
    x3 = _normal(rng, n) + p.x3_u * u + p.x_c * c
    x4 = _normal(rng, n) + p.x4_sq * x3**2 + p.x4_cu * x3**3 + p.x4_u * u + p.x_c * c
    return np.column_stack([x1, x2, x3, x4])


def generate_fully_synthetic(params: SynthParams) -> Dataset:
    """Draw a dataset from the fully synthetic process.

    Two independent feature-block realizations are produced for training
    and two for inference, all sharing each row's confounder and
    covariate, so proxy protocols can choose distinct or shared text
    stand-ins per unit.
    """
    rng = _rng(params.seed)
    n = params.n
    u = _bernoulli(rng, params.u_prob, n)
    c = _normal(rng, n)
    blocks = {key: _feature_block(rng, u, c, params)
              for key in ("train1", "train2", "inf1", "inf2")}
    p_a = expit(params.a_u * u + params.a_c * c + params.a_bias)
    a = _bernoulli(rng, p_a, n)
    y = _normal(rng, n) + params.true_ace * a + params.y_u * u + params.y_c * c
    return Dataset(a=a, y=y, c={"C": c}, u=u, blocks=blocks,
                   block_features=FEATURE_NAMES)


def overlay_semi_synthetic(
    covariates: dict[str, np.ndarray],
    u,
    seed,
    ace: float = 1.3,
    u_coef: float = 1.0,
    covariate_coefs: dict[str, float] | None = None,
) -> Dataset:
    """Overlay synthetic treatment and outcome on real covariates.

    Treatment is Bernoulli(expit(u_coef*U + sum of coef*covariate)); the
    outcome adds unit Gaussian noise to ace*A plus the same confounder
    and covariate terms. Continuous covariates must arrive standardized
    (see :func:`proxitext.regress.standardize`); binary 0/1 covariates
    are exempt from that check. Draw order: treatment uniforms, then
    outcome noise.
    """
    u = np.asarray(u, dtype=float)
    if not np.isin(u, (0.0, 1.0)).all():
        raise ValueError("oracle column must be binary 0/1")
    n = u.shape[0]
    cov = {k: np.asarray(v, dtype=float) for k, v in covariates.items()}
    for k, v in cov.items():
        if v.shape != (n,):
            raise ValueError(f"covariate {k!r} length mismatch")
        if np.isin(v, (0.0, 1.0)).all():
            continue
        if abs(v.mean()) > 0.1 or not 0.9 <= v.std() <= 1.1:
            raise ValueError(
                f"continuous covariate {k!r} looks unstandardized "
                "(|mean| > 0.1 or stddev outside [0.9, 1.1]); standardize first"
            )
    if covariate_coefs is None:
        covariate_coefs = {k: 0.9 for k in cov}
    missing = set(cov) - set(covariate_coefs)
    if missing:
        raise ValueError(f"missing coefficients for covariates: {sorted(missing)}")

    rng = _rng(seed)
    linear = u_coef * u + sum(covariate_coefs[k] * v for k, v in cov.items())
    a = _bernoulli(rng, expit(linear), n)
    y = _normal(rng, n) + ace * a + linear
    return Dataset(a=a, y=y, c=cov, u=u)
