from __future__ import annotations

import numpy as np
import pytest

from proxitext import SynthParams, generate_fully_synthetic


@pytest.fixture(scope="session")
def synth_10k():
    """One mid-size synthetic dataset shared by read-only tests."""
    return generate_fully_synthetic(SynthParams(n=10_000, seed=12345))


@pytest.fixture(scope="session")
def synth_100k():
    """Large dataset for consistency checks; generated once."""
    return generate_fully_synthetic(SynthParams(n=100_000, seed=777))


@pytest.fixture()
def rng():
    return np.random.default_rng(2024)
