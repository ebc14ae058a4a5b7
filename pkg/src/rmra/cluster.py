"""Deterministic k-means for embedding coordinates.

Lloyd's algorithm with k-means++ seeding, a fixed 300-iteration cap and
1e-8 relative tolerance on the center shift.  All randomness comes from
the explicit generator, so identical seeds give identical labels.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

__all__ = ["kmeans"]

MAX_ITER = 300
TOL = 1e-8


def _kmeanspp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]), dtype=np.float64)
    centers[0] = x[int(rng.integers(n))]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # all remaining mass on existing centers; pick uniformly
            centers[j] = x[int(rng.integers(n))]
            continue
        probs = d2 / total
        centers[j] = x[int(rng.choice(n, p=probs))]
        d2 = np.minimum(d2, np.sum((x - centers[j]) ** 2, axis=1))
    return centers


def kmeans(x: np.ndarray, k: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Cluster rows of ``x`` into ``k`` groups.

    Returns ``(labels, centers)``.  Raises if ``k`` exceeds the number of
    distinct rows.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValidationError(f"expected a 2-D sample array, got shape {x.shape}")
    n_distinct = np.unique(x, axis=0).shape[0]
    if not 1 <= k <= n_distinct:
        raise ValidationError(
            f"k must be in [1, {n_distinct}] (number of distinct points), got {k}"
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    centers = _kmeanspp_init(x, k, rng)
    labels = np.zeros(x.shape[0], dtype=np.int64)
    for _ in range(MAX_ITER):
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1)
        new_centers = centers.copy()
        for j in range(k):
            members = labels == j
            if np.any(members):
                new_centers[j] = x[members].mean(axis=0)
            else:
                # deterministic restart: take the point farthest from its center
                worst = int(np.argmax(d2[np.arange(x.shape[0]), labels]))
                new_centers[j] = x[worst]
        shift = np.linalg.norm(new_centers - centers)
        scale = max(np.linalg.norm(centers), 1.0)
        centers = new_centers
        if shift <= TOL * scale:
            break
    d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    return labels, centers
