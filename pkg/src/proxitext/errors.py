"""Shared exception and warning types."""

from __future__ import annotations


class DegenerateProxyError(ValueError):
    """A proxy column is constant (or otherwise carries no variation).

    Constant proxies violate the relevance requirement and are rejected
    before any estimation step sees them.
    """


class BootstrapError(RuntimeError):
    """Too many bootstrap replicates failed to produce a usable estimate."""


class StageOneWarning(UserWarning):
    """Stage-1 proxy regression did not converge cleanly (e.g. separation)."""
