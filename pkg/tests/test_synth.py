"""Seeded generators: distributional correctness and determinism."""

from __future__ import annotations

import numpy as np
import pytest

from proxitext import SynthParams, generate_fully_synthetic, overlay_semi_synthetic
from proxitext.regress import DesignMatrix, ols_fit


def _ols_coef(cols: dict, y, name: str) -> float:
    model = ols_fit(DesignMatrix.from_columns(cols), y)
    return model.coefficients[name]


def test_confounder_prevalence(synth_100k):
    assert synth_100k.u.mean() == pytest.approx(0.48, abs=0.01)


def test_oracle_regression_recovers_true_effect(synth_100k):
    d = synth_100k
    coef = _ols_coef({"A": d.a, "U": d.u, "C": d.c["C"]}, d.y, "A")
    assert coef == pytest.approx(1.3, abs=0.03)


def test_omitting_confounder_biases_effect(synth_100k):
    d = synth_100k
    coef = _ols_coef({"A": d.a, "C": d.c["C"]}, d.y, "A")
    assert abs(coef - 1.3) > 0.1


def test_same_seed_bit_identical():
    p = SynthParams(n=500, seed=11)
    d1 = generate_fully_synthetic(p)
    d2 = generate_fully_synthetic(p)
    assert np.array_equal(d1.a, d2.a)
    assert np.array_equal(d1.y, d2.y)
    assert np.array_equal(d1.u, d2.u)
    for key in d1.blocks:
        assert np.array_equal(d1.blocks[key], d2.blocks[key])


def test_distinct_seeds_differ():
    d1 = generate_fully_synthetic(SynthParams(n=500, seed=11))
    d2 = generate_fully_synthetic(SynthParams(n=500, seed=12))
    assert not np.array_equal(d1.y, d2.y)


def test_draw_order_fingerprint():
    # regression guard for the documented draw order and inverse-CDF
    # sampling; these values pin the portable stream contract
    d = generate_fully_synthetic(SynthParams(n=1000, seed=42))
    assert d.u[:5].tolist() == [0.0, 1.0, 0.0, 0.0, 1.0]
    np.testing.assert_allclose(
        d.c["C"][:3], [-1.53768271, -0.10481314, -1.13098807], atol=1e-8)
    np.testing.assert_allclose(
        d.blocks["train1"][:3, 0], [-3.60729858, 1.50077193, -1.7185523], atol=1e-8)
    assert d.a[:10].tolist() == [1, 0, 0, 0, 0, 0, 0, 0, 1, 1]
    np.testing.assert_allclose(
        d.y[:3], [-2.51328411, 2.80194189, 0.44680643], atol=1e-8)


def test_realizations_conditionally_uncorrelated(synth_100k):
    # regress one realization on the other plus U and C; the partial
    # coefficient must sit within 3 standard errors of zero
    d = synth_100k
    x1a = d.blocks["train1"][:, 0]
    x1b = d.blocks["train2"][:, 0]
    x = np.column_stack([np.ones(d.n), x1b, d.u, d.c["C"]])
    beta, *_ = np.linalg.lstsq(x, x1a, rcond=None)
    resid = x1a - x @ beta
    sigma2 = resid @ resid / (d.n - x.shape[1])
    se = np.sqrt(sigma2 * np.linalg.inv(x.T @ x)[1, 1])
    assert abs(beta[1]) <= 3 * se


def test_blocks_share_row_confounder(synth_10k):
    # the same row's U shifts every realization's first feature
    d = synth_10k
    for key in ("train1", "train2", "inf1", "inf2"):
        x1 = d.blocks[key][:, 0]
        gap = x1[d.u == 1].mean() - x1[d.u == 0].mean()
        assert gap == pytest.approx(1.95, abs=0.2)


def test_coefficient_overrides_flow_through():
    base = SynthParams(n=5000, seed=3)
    heavy = SynthParams(n=5000, seed=3, true_ace=2.5)
    d_base = generate_fully_synthetic(base)
    d_heavy = generate_fully_synthetic(heavy)
    coef = _ols_coef(
        {"A": d_heavy.a, "U": d_heavy.u, "C": d_heavy.c["C"]}, d_heavy.y, "A")
    assert coef == pytest.approx(2.5, abs=0.15)
    # same seed, same draws: only the structural coefficient moved
    assert np.array_equal(d_base.a, d_heavy.a)


def test_params_validation():
    with pytest.raises(ValueError, match="at least 100"):
        SynthParams(n=50)
    with pytest.raises(ValueError, match="finite"):
        SynthParams(n=200, true_ace=float("inf"))


# -- semi-synthetic overlay ----------------------------------------------------

def test_overlay_treatment_probability_matches_expit_oracle():
    n = 200_000
    ones, zeros = np.ones(n), np.zeros(n)
    d = overlay_semi_synthetic({"Gender": ones, "Age": zeros}, ones, seed=5)
    expected = 1.0 / (1.0 + np.exp(-1.9))  # u + 0.9*1 + 0.9*0
    assert d.a.mean() == pytest.approx(expected, abs=0.005)


def test_overlay_neutral_rows_are_coin_flips():
    n = 200_000
    zeros = np.zeros(n)
    d = overlay_semi_synthetic({"Gender": zeros, "Age": zeros}, zeros, seed=6)
    assert d.a.mean() == pytest.approx(0.5, abs=0.005)


def test_overlay_recovers_true_effect():
    rng = np.random.default_rng(9)
    n = 100_000
    gender = (rng.random(n) < 0.5).astype(float)
    age = rng.standard_normal(n)
    u = (rng.random(n) < 0.3).astype(float)
    d = overlay_semi_synthetic({"Gender": gender, "Age": age}, u, seed=7)
    coef = _ols_coef({"A": d.a, "U": d.u, "Gender": gender, "Age": age}, d.y, "A")
    assert coef == pytest.approx(1.3, abs=0.03)


def test_overlay_is_deterministic():
    from proxitext.regress import standardize

    rng = np.random.default_rng(1)
    cov = {"Age": standardize(rng.standard_normal(300))}
    u = (rng.random(300) < 0.4).astype(float)
    d1 = overlay_semi_synthetic(cov, u, seed=44)
    d2 = overlay_semi_synthetic(cov, u, seed=44)
    assert np.array_equal(d1.a, d2.a)
    assert np.array_equal(d1.y, d2.y)


def test_overlay_rejects_unstandardized_continuous_covariate():
    rng = np.random.default_rng(2)
    age_raw = rng.normal(65.0, 12.0, size=300)
    u = (rng.random(300) < 0.4).astype(float)
    with pytest.raises(ValueError, match="standardize"):
        overlay_semi_synthetic({"Age": age_raw}, u, seed=0)


def test_overlay_accepts_binary_covariates_unscaled():
    rng = np.random.default_rng(3)
    gender = (rng.random(300) < 0.8).astype(float)  # mean far from 0: fine
    u = (rng.random(300) < 0.4).astype(float)
    overlay_semi_synthetic({"Gender": gender}, u, seed=0)


def test_overlay_length_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        overlay_semi_synthetic({"Age": np.zeros(5)}, np.zeros(4), seed=0)


def test_overlay_rejects_nonbinary_oracle():
    with pytest.raises(ValueError, match="binary"):
        overlay_semi_synthetic({"Age": np.zeros(5)}, np.full(5, 0.25), seed=0)
