"""Shared fitted-model container, assignment, statistics and serialization.

A single ClusterModel dataclass holds the state of any of the four fitted
algorithms (plus the nearest-centroid model produced by centroid refinement);
the unused state slots stay None.  Cluster ids are canonical: cluster 0 is the
cluster whose member rows have the lower mean along dimension 0 (stable order
on ties), which gives every downstream consumer a deterministic labeling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json

import numpy as np

from ..errors import FitError, InputError, StatsError
from ..features import FeatureRow, NormalizationParams

__all__ = [
    "ClusterModel",
    "as_matrix",
    "assign",
    "assign_many",
    "cluster_stats",
    "member_stats",
    "canonical_permutation",
    "save_model",
    "load_model",
    "MODEL_FORMAT",
    "MODEL_VERSION",
]

MODEL_FORMAT = "amsdetect-model"
MODEL_VERSION = 1


def as_matrix(rows) -> np.ndarray:
    """Accept a (n, d) array, a 1-D array, or a list of FeatureRow."""
    if isinstance(rows, np.ndarray):
        mat = rows.astype(np.float64, copy=False)
    elif rows and isinstance(rows[0], FeatureRow):
        mat = np.stack([r.values for r in rows])
    else:
        mat = np.asarray(rows, dtype=np.float64)
    if mat.ndim == 1:
        mat = mat[:, None]
    if mat.ndim != 2 or mat.size == 0:
        raise InputError("expected a non-empty (n, d) dataset")
    if not np.all(np.isfinite(mat)):
        raise InputError("dataset contains non-finite values")
    return mat


@dataclass
class ClusterModel:
    """A fitted 2-way (k-way) clustering with canonical cluster ordering."""

    algorithm: str                       # kmeans | gmm | birch | spectral | centroid
    k: int
    mu_k: np.ndarray                     # (k, d) member means, canonical order
    sigma_k: np.ndarray                  # (k, d) member population stds
    centroids: np.ndarray | None = None          # kmeans / birch global / centroid
    weights: np.ndarray | None = None             # gmm mixing weights
    means: np.ndarray | None = None                # gmm component means
    variances: np.ndarray | None = None            # gmm diagonal variances
    train_rows: np.ndarray | None = None           # spectral
    train_assignments: np.ndarray | None = None    # spectral
    embedding: np.ndarray | None = None            # spectral (row-normalized)
    sse_history: list[float] = field(default_factory=list)
    loglik_history: list[float] = field(default_factory=list)
    feature_names: tuple[str, ...] | None = None   # bound by the CLI fit path
    norm: NormalizationParams | None = None
    centroid_pairs: list | None = None             # CentroidPair list (refit models)
    anomalous_cluster: int = 1

    def __post_init__(self):
        self.mu_k = np.asarray(self.mu_k, dtype=np.float64)
        self.sigma_k = np.asarray(self.sigma_k, dtype=np.float64)
        if self.mu_k.shape != self.sigma_k.shape or self.mu_k.shape[0] != self.k:
            raise InputError("mu_k/sigma_k must both be (k, d)")

    @property
    def dim(self) -> int:
        return int(self.mu_k.shape[1])


def member_stats(mat: np.ndarray, labels: np.ndarray, k: int
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster per-dimension mean and population std of member rows."""
    mu = np.empty((k, mat.shape[1]))
    sigma = np.empty((k, mat.shape[1]))
    for j in range(k):
        members = mat[labels == j]
        if members.shape[0] == 0:
            raise StatsError(f"cluster {j} has no members")
        mu[j] = members.mean(axis=0)
        sigma[j] = members.std(axis=0)
    return mu, sigma


def canonical_permutation(mat: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """perm[old_id] = new_id so new cluster 0 has the lower mean on dim 0."""
    means0 = np.empty(k)
    for j in range(k):
        members = mat[labels == j]
        if members.shape[0] == 0:
            raise FitError(f"fit produced an empty cluster (id {j})")
        means0[j] = members[:, 0].mean()
    order = sorted(range(k), key=lambda j: (means0[j], j))
    perm = np.empty(k, dtype=np.int64)
    for new_id, old_id in enumerate(order):
        perm[old_id] = new_id
    return perm


def _nearest(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)  # ties resolve to the lower cluster id


def assign_many(model: ClusterModel, rows) -> np.ndarray:
    """Assign each row to a cluster id under the model's canonical ordering."""
    mat = as_matrix(rows)
    if mat.shape[1] != model.dim:
        raise InputError(f"model expects {model.dim}-dim rows, got {mat.shape[1]}")
    if model.algorithm in ("kmeans", "birch", "centroid"):
        return _nearest(mat, model.centroids)
    if model.algorithm == "gmm":
        from .gmm import gmm_log_responsibilities
        log_resp, _ = gmm_log_responsibilities(model.weights, model.means,
                                               model.variances, mat)
        return np.argmax(log_resp, axis=1)
    if model.algorithm == "spectral":
        d2 = ((mat[:, None, :] - model.train_rows[None, :, :]) ** 2).sum(axis=2)
        nearest_row = np.argmin(d2, axis=1)
        return model.train_assignments[nearest_row]
    raise InputError(f"unknown algorithm {model.algorithm!r}")


def assign(model: ClusterModel, row) -> int:
    return int(assign_many(model, np.atleast_2d(np.asarray(row, dtype=np.float64)))[0])


def cluster_stats(model: ClusterModel, rows) -> tuple[np.ndarray, np.ndarray]:
    """(mu_k, sigma_k) of the given rows under the model, canonically ordered.

    Ordering is re-derived from the rows themselves (lower mean along dim 0
    first), so relabeling the model's clusters cannot change the output order.
    """
    mat = as_matrix(rows)
    labels = assign_many(model, mat)
    mu, sigma = member_stats(mat, labels, model.k)
    order = sorted(range(model.k), key=lambda j: (mu[j, 0], j))
    return mu[order], sigma[order]


def _arr(x):
    return None if x is None else np.asarray(x).tolist()


def save_model(model: ClusterModel, path) -> None:
    """Serialize to versioned JSON text; floats round-trip exactly."""
    pairs = None
    if model.centroid_pairs is not None:
        pairs = [{"low": p.low, "high": p.high, "m_l": p.m_l, "m_g": p.m_g,
                  "low_fallback": p.low_fallback, "high_fallback": p.high_fallback}
                 for p in model.centroid_pairs]
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "algorithm": model.algorithm,
        "k": model.k,
        "mu_k": _arr(model.mu_k),
        "sigma_k": _arr(model.sigma_k),
        "centroids": _arr(model.centroids),
        "weights": _arr(model.weights),
        "means": _arr(model.means),
        "variances": _arr(model.variances),
        "train_rows": _arr(model.train_rows),
        "train_assignments": _arr(model.train_assignments),
        "embedding": _arr(model.embedding),
        "sse_history": model.sse_history,
        "loglik_history": model.loglik_history,
        "feature_names": list(model.feature_names) if model.feature_names else None,
        "norm": (None if model.norm is None else
                 {"mins": _arr(model.norm.mins), "maxs": _arr(model.norm.maxs)}),
        "centroid_pairs": pairs,
        "anomalous_cluster": model.anomalous_cluster,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _np(x, dtype=np.float64):
    return None if x is None else np.asarray(x, dtype=dtype)


def load_model(path) -> ClusterModel:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not a model file ({exc})")
    if doc.get("format") != MODEL_FORMAT:
        raise InputError(f"{path}: not an {MODEL_FORMAT} file")
    if doc.get("version") != MODEL_VERSION:
        raise InputError(f"{path}: unsupported model version {doc.get('version')!r} "
                         f"(this build reads version {MODEL_VERSION})")
    norm = None
    if doc.get("norm") is not None:
        norm = NormalizationParams(np.asarray(doc["norm"]["mins"]),
                                   np.asarray(doc["norm"]["maxs"]))
    pairs = None
    if doc.get("centroid_pairs") is not None:
        from ..centroid import CentroidPair
        pairs = [CentroidPair(p["low"], p["high"], p["m_l"], p["m_g"],
                              p["low_fallback"], p["high_fallback"])
                 for p in doc["centroid_pairs"]]
    return ClusterModel(
        algorithm=doc["algorithm"],
        k=doc["k"],
        mu_k=_np(doc["mu_k"]),
        sigma_k=_np(doc["sigma_k"]),
        centroids=_np(doc.get("centroids")),
        weights=_np(doc.get("weights")),
        means=_np(doc.get("means")),
        variances=_np(doc.get("variances")),
        train_rows=_np(doc.get("train_rows")),
        train_assignments=_np(doc.get("train_assignments"), dtype=np.int64),
        embedding=_np(doc.get("embedding")),
        sse_history=list(doc.get("sse_history") or []),
        loglik_history=list(doc.get("loglik_history") or []),
        feature_names=(tuple(doc["feature_names"]) if doc.get("feature_names")
                       else None),
        norm=norm,
        centroid_pairs=pairs,
        anomalous_cluster=int(doc.get("anomalous_cluster", 1)),
    )
