"""Hot numeric kernel: damped-Newton IRLS for weighted logistic regression.

Two implementations of the same algorithm live here: a loop-fused version
compiled with numba's ``@njit`` (the default path; loops fuse the expit,
score, and curvature passes so each Newton iteration touches the data
once) and a vectorized pure-numpy fallback. Set the environment variable
``PROXITEXT_DISABLE_NUMBA=1`` before import to force the numpy path, e.g.
on platforms without a working numba install.

Both paths take ``x`` as the (n, p) float64 design including the
intercept column, 0/1 ``y``, and per-row weights ``w``; no penalty term.
Convergence when the weighted score has max-abs <= score_tol or the
accepted step has 2-norm <= step_tol. If any coefficient passes ``clamp``
in magnitude the data are treated as separated: iteration stops, the
coefficients are clamped to [-clamp, clamp], and the separation flag is
set. Return value is ``(beta, converged, separated, n_iter)``.

The paths differ in floating-point summation order, so results can
differ in the last bits; ``benchmarks/kernel_bench.py`` times them
against each other and checks agreement. Bootstrap loops call this
kernel thousands of times per experiment, which is why it is the piece
worth compiling; everything around it is ordinary numpy.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "PROXITEXT_DISABLE_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip().lower() not in ("1", "true", "yes")


def irls_numpy(x, y, w, max_iter, score_tol, step_tol, clamp):
    """Vectorized fallback implementation (see module docstring)."""
    n, p = x.shape
    beta = np.zeros(p)
    eta = np.zeros(n)
    # log-likelihood at beta = 0; the line search keeps it current so each
    # iteration pays a single transcendental pass over the data
    ll_cur = -np.log(2.0) * np.sum(w)
    converged = False
    separated = False
    n_iter = 0
    for _ in range(max_iter):
        n_iter += 1
        ex = np.exp(-np.abs(eta))
        prob = np.where(eta >= 0.0, 1.0 / (1.0 + ex), ex / (1.0 + ex))
        score = x.T @ (w * (y - prob))
        if np.max(np.abs(score)) <= score_tol:
            converged = True
            break
        curv = w * prob * (1.0 - prob)
        hess = (x * curv.reshape(-1, 1)).T @ x
        # lstsq instead of solve: stays finite when curvature underflows
        delta = np.linalg.lstsq(hess, score)[0]
        x_delta = x @ delta
        step = 1.0
        improved = False
        eta_new = eta
        ll = ll_cur
        # accept within float resolution of the objective: near the optimum
        # the true gain per step drops below eps*|ll| while the score is
        # still above tolerance, and Newton must be allowed to finish
        slack = 1e-13 * (1.0 + abs(ll_cur))
        for _ in range(40):
            eta_new = eta + step * x_delta
            ll = np.sum(w * (y * eta_new - (np.maximum(eta_new, 0.0)
                                            + np.log1p(np.exp(-np.abs(eta_new))))))
            if ll > ll_cur - slack:
                improved = True
                break
            step *= 0.5
        step_norm = np.sqrt(np.sum((step * delta) ** 2))
        if not improved:
            # no ascending step left at this scale: numerical optimum
            converged = step_norm <= step_tol
            break
        beta = beta + step * delta
        eta = eta_new
        ll_cur = ll
        if np.max(np.abs(beta)) > clamp:
            separated = True
            beta = np.minimum(np.maximum(beta, -clamp), clamp)
            converged = False
            break
        if step_norm <= step_tol:
            converged = True
            break
    return beta, converged, separated, n_iter


def _irls_loops(x, y, w, max_iter, score_tol, step_tol, clamp):
    """Loop-fused implementation; only ever run compiled."""
    n, p = x.shape
    beta = np.zeros(p)
    eta = np.zeros(n)
    eta_new = np.zeros(n)
    x_delta = np.zeros(n)
    score = np.zeros(p)
    hess = np.zeros((p, p))
    ll_cur = 0.0
    for i in range(n):
        ll_cur -= np.log(2.0) * w[i]
    converged = False
    separated = False
    n_iter = 0
    for _ in range(max_iter):
        n_iter += 1
        for j in range(p):
            score[j] = 0.0
            for k in range(p):
                hess[j, k] = 0.0
        for i in range(n):
            e = eta[i]
            ex = np.exp(-abs(e))
            if e >= 0.0:
                pr = 1.0 / (1.0 + ex)
            else:
                pr = ex / (1.0 + ex)
            resid = w[i] * (y[i] - pr)
            cv = w[i] * pr * (1.0 - pr)
            for j in range(p):
                xij = x[i, j]
                score[j] += xij * resid
                for k in range(j, p):
                    hess[j, k] += xij * x[i, k] * cv
        for j in range(p):
            for k in range(j):
                hess[j, k] = hess[k, j]
        max_score = 0.0
        for j in range(p):
            if abs(score[j]) > max_score:
                max_score = abs(score[j])
        if max_score <= score_tol:
            converged = True
            break
        delta = np.linalg.lstsq(hess, score)[0]
        for i in range(n):
            acc = 0.0
            for j in range(p):
                acc += x[i, j] * delta[j]
            x_delta[i] = acc
        step = 1.0
        improved = False
        ll = ll_cur
        # same acceptance slack as the numpy path (see comment there)
        slack = 1e-13 * (1.0 + abs(ll_cur))
        for _ in range(40):
            ll = 0.0
            for i in range(n):
                e = eta[i] + step * x_delta[i]
                eta_new[i] = e
                ll += w[i] * (y[i] * e - (max(e, 0.0) + np.log1p(np.exp(-abs(e)))))
            if ll > ll_cur - slack:
                improved = True
                break
            step *= 0.5
        step_norm = 0.0
        for j in range(p):
            step_norm += (step * delta[j]) ** 2
        step_norm = np.sqrt(step_norm)
        if not improved:
            converged = step_norm <= step_tol
            break
        for j in range(p):
            beta[j] = beta[j] + step * delta[j]
        for i in range(n):
            eta[i] = eta_new[i]
        ll_cur = ll
        max_beta = 0.0
        for j in range(p):
            if abs(beta[j]) > max_beta:
                max_beta = abs(beta[j])
        if max_beta > clamp:
            separated = True
            for j in range(p):
                beta[j] = min(max(beta[j], -clamp), clamp)
            converged = False
            break
        if step_norm <= step_tol:
            converged = True
            break
    return beta, converged, separated, n_iter


if _numba_requested():
    try:
        from numba import njit

        irls_compiled = njit(cache=True, nogil=True)(_irls_loops)
    except ImportError:  # pragma: no cover - numba is a declared dependency
        irls_compiled = None
else:
    irls_compiled = None

JIT_ENABLED = irls_compiled is not None

irls = irls_compiled if JIT_ENABLED else irls_numpy
