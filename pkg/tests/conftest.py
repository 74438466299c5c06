import numpy as np
import pytest


@pytest.fixture
def blobs_2d():
    """Two well-separated 2-D Gaussian blobs (>= 6 sigma apart), 200 each."""
    rng = np.random.default_rng(42)
    a = rng.normal([0.2, 0.2], 0.04, size=(200, 2))
    b = rng.normal([0.8, 0.8], 0.04, size=(200, 2))
    mat = np.vstack([a, b])
    labels = np.array([0] * 200 + [1] * 200)
    return mat, labels


@pytest.fixture
def blobs_1d():
    rng = np.random.default_rng(7)
    a = rng.normal(0.2, 0.04, 200)
    b = rng.normal(0.8, 0.04, 200)
    return np.concatenate([a, b])[:, None], np.array([0] * 200 + [1] * 200)


@pytest.fixture
def overlap_1d():
    """Factory for overlapping 1-D Gaussian pairs, min-max scaled to [0, 1]."""

    def make(seed, n=200, lo=0.35, hi=0.65, s=0.12):
        rng = np.random.default_rng(seed)
        vals = np.concatenate([rng.normal(lo, s, n), rng.normal(hi, s, n)])
        labels = np.array([0] * n + [1] * n)
        span = vals.max() - vals.min()
        return ((vals - vals.min()) / span)[:, None], labels

    return make


@pytest.fixture
def tiny_sets():
    """Small 1-D point sets where the optimal 2-split is known exhaustively."""
    return [
        [0.0, 1.0, 2.0, 10.0, 11.0, 12.0],
        [0.0, 0.2, 0.5, 5.0, 5.1, 5.3, 9.0, 9.5],
        [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 20.0],
        [0.0, 3.0, 6.0, 9.0, 12.0, 15.0],
        [-4.0, -3.5, -3.0, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
    ]
