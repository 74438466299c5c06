"""Lloyd k-means with D^2-weighted seeding.

The inner loop (`lloyd`) is shared by the other algorithms: BIRCH reuses it
with per-point weights for its global phase and spectral clustering runs it
on the embedded rows.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError, FitError
from .model import ClusterModel, as_matrix, canonical_permutation, member_stats

__all__ = ["fit_kmeans", "lloyd", "kmeans_pp_init"]


def _sse(mat, centroids, labels, weights):
    d2 = ((mat - centroids[labels]) ** 2).sum(axis=1)
    return float(np.dot(weights, d2))


def kmeans_pp_init(mat: np.ndarray, k: int, rng: np.random.Generator,
                   weights: np.ndarray | None = None) -> np.ndarray:
    """D^2 seeding: spread the initial centroids across the data."""
    n = mat.shape[0]
    w = np.ones(n) if weights is None else weights
    chosen = [int(rng.integers(n))]
    while len(chosen) < k:
        d2 = np.min(((mat[:, None, :] - mat[chosen][None, :, :]) ** 2).sum(axis=2),
                    axis=1)
        probs = w * d2
        total = probs.sum()
        if total <= 0.0:
            raise FitError("cannot seed k centroids: fewer than k distinct points")
        chosen.append(int(rng.choice(n, p=probs / total)))
    return mat[chosen].copy()


def lloyd(mat: np.ndarray, centroids: np.ndarray, max_iter: int = 100,
          tol: float = 1e-10, weights: np.ndarray | None = None
          ) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Iterate assignment/update until labels stabilize or SSE stalls.

    Returns (centroids, labels, sse_history); the history is recorded after
    every assignment step and is non-increasing.
    """
    k = centroids.shape[0]
    n = mat.shape[0]
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    centroids = centroids.astype(np.float64).copy()
    labels = None
    history: list[float] = []
    for _ in range(max_iter):
        d2 = ((mat[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        # revive any emptied cluster with the worst-fitting point
        for j in range(k):
            if not np.any(new_labels == j):
                worst = int(np.argmax(w * d2[np.arange(n), new_labels]))
                new_labels[worst] = j
                centroids[j] = mat[worst]
        history.append(_sse(mat, centroids, new_labels, w))
        if labels is not None and np.array_equal(labels, new_labels):
            labels = new_labels
            break
        labels = new_labels
        for j in range(k):
            members = labels == j
            centroids[j] = np.average(mat[members], axis=0, weights=w[members])
        if len(history) >= 2 and history[-2] - history[-1] < tol:
            break
    return centroids, labels, history


def fit_kmeans(rows, k: int = 2, max_iter: int = 100, tol: float = 1e-10,
               seed: int | None = 0, init="kmeans++") -> ClusterModel:
    """Fit k-means and return a canonical ClusterModel.

    :param init: "kmeans++" (seeded by ``seed``) or an explicit (k, d) array
        of starting centroids
    :raises FitError: fewer than k distinct rows, or an empty final cluster
    """
    mat = as_matrix(rows)
    if k < 2:
        raise ConfigurationError("k must be >= 2", config_key="k")
    if mat.shape[0] < k:
        raise FitError(f"need at least k={k} rows, got {mat.shape[0]}")
    if np.unique(mat, axis=0).shape[0] < k:
        raise FitError(f"need at least k={k} distinct rows")
    if isinstance(init, str):
        if init != "kmeans++":
            raise ConfigurationError(f"unknown init {init!r}", config_key="init")
        start = kmeans_pp_init(mat, k, np.random.default_rng(seed))
    else:
        start = np.asarray(init, dtype=np.float64)
        if start.ndim == 1:
            start = start[:, None]
        if start.shape != (k, mat.shape[1]):
            raise ConfigurationError(
                f"initial centroids must be ({k}, {mat.shape[1]})",
                config_key="init")
    centroids, labels, history = lloyd(mat, start, max_iter, tol)
    perm = canonical_permutation(mat, labels, k)
    labels = perm[labels]
    inv = np.argsort(perm)
    centroids = centroids[inv]
    mu, sigma = member_stats(mat, labels, k)
    return ClusterModel(algorithm="kmeans", k=k, mu_k=mu, sigma_k=sigma,
                        centroids=centroids, train_assignments=labels,
                        sse_history=history)
