"""Doubly normalized symmetric diffusion operators from point clouds.

Pipeline: squared pairwise distances -> Gaussian kernel (bandwidth from the
median pairwise distance unless fixed) -> double normalization

    W_hat = Dhat^{-1} K Dhat^{-1},   W = D^{-1/2} W_hat D^{-1/2}

with ``Dhat = diag(K 1)`` and ``D = diag(W_hat 1)``.  The result W is
symmetric with spectrum in [0, 1] and top eigenvalue exactly 1 on the
eigenvector proportional to ``D^{1/2} 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import NumericalError, ValidationError
from .linalg import EigenSystem, SpdMatrix, SymmetricMatrix

__all__ = [
    "Dataset",
    "KernelConfig",
    "NormalizedKernel",
    "pairwise_sq_dists",
    "gaussian_kernel",
    "normalize_kernel",
    "dm_eigenvectors",
    "diffusion_operator",
]


@dataclass(frozen=True)
class Dataset:
    """N points in R^d with persistent identities 0..N-1."""

    points: np.ndarray
    ids: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2:
            raise ValidationError(f"points must be 2-D, got shape {pts.shape}")
        if pts.shape[0] < 2:
            raise ValidationError("a dataset needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("points must be finite")
        ids = self.ids
        if ids is None:
            ids = np.arange(pts.shape[0])
        ids = np.asarray(ids, dtype=np.int64)
        if ids.shape != (pts.shape[0],):
            raise ValidationError("ids must be one per point")
        pts.setflags(write=False)
        ids.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "ids", ids)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class KernelConfig:
    """Bandwidth selection: ``rule="median"`` takes the median pairwise
    Euclidean distance times ``bandwidth_scale``; ``rule="fixed"`` uses
    ``sigma`` directly."""

    bandwidth_scale: float = 1.0
    rule: str = "median"
    sigma: float | None = None

    def __post_init__(self):
        if self.rule not in ("median", "fixed"):
            raise ValidationError(f"unknown bandwidth rule {self.rule!r}")
        if self.rule == "median" and not self.bandwidth_scale > 0:
            raise ValidationError("bandwidth_scale must be positive")
        if self.rule == "fixed":
            if self.sigma is None or not self.sigma > 0:
                raise ValidationError("fixed bandwidth requires sigma > 0")


@dataclass(frozen=True)
class NormalizedKernel:
    """Doubly normalized operator W plus the two normalization diagonals."""

    w: SymmetricMatrix
    dhat: np.ndarray
    d: np.ndarray


def pairwise_sq_dists(ds: Dataset) -> SymmetricMatrix:
    """N x N squared Euclidean distances; zero diagonal, exactly symmetric."""
    d2 = squareform(pdist(ds.points, "sqeuclidean"))
    return SymmetricMatrix(d2)


def _lower_median(values: np.ndarray) -> float:
    # lower median: deterministic for even counts
    k = (values.size - 1) // 2
    return float(np.partition(values, k)[k])


def resolve_bandwidth(d2: SymmetricMatrix, cfg: KernelConfig) -> float:
    """Kernel scale per the config rule, from the N(N-1)/2 distinct
    pairwise distances (diagonal excluded, non-squared)."""
    if cfg.rule == "fixed":
        return float(cfg.sigma)
    tri = np.sqrt(d2.a[np.triu_indices(d2.dim, k=1)])
    med = _lower_median(tri)
    if med <= 0.0:
        raise ValidationError(
            "median pairwise distance is zero (all points identical); "
            "use the fixed bandwidth rule with an explicit sigma"
        )
    return med * cfg.bandwidth_scale


def gaussian_kernel(d2: SymmetricMatrix, cfg: KernelConfig) -> tuple[SpdMatrix, float]:
    """Gaussian affinity ``K[i, j] = exp(-d2[i, j] / sigma^2)``.

    Returns the kernel and the resolved bandwidth.  The kernel has unit
    diagonal and is positive definite up to round-off drift (see
    :meth:`SpdMatrix.from_kernel`).
    """
    sigma = resolve_bandwidth(d2, cfg)
    k = np.exp(-d2.a / (sigma * sigma))
    return SpdMatrix.from_kernel(SymmetricMatrix(k)), sigma


def normalize_kernel(k: SpdMatrix) -> NormalizedKernel:
    """Double normalization producing the symmetric diffusion operator."""
    a = k.a
    dhat = a.sum(axis=1)
    if np.any(dhat <= 0.0):
        raise NumericalError("kernel has a non-positive row sum")
    w_hat = a / np.outer(dhat, dhat)
    d = w_hat.sum(axis=1)
    if np.any(d <= 0.0):
        raise NumericalError("normalized kernel has a non-positive row sum")
    sqrt_d = np.sqrt(d)
    w = w_hat / np.outer(sqrt_d, sqrt_d)
    return NormalizedKernel(w=SymmetricMatrix(w), dhat=dhat, d=d)


def dm_eigenvectors(w_eig: EigenSystem, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right and left eigenvectors of the random-walk form of the operator.

    The symmetric W and the row-stochastic ``D^{-1} W_hat`` are similar, so
    they share eigenvalues; the right/left eigenvectors of the latter are
    ``D^{-1/2} psi`` and ``D^{1/2} psi``.
    """
    d = np.asarray(d, dtype=np.float64)
    if d.shape != (w_eig.dim,):
        raise ValidationError("diagonal length must match the eigensystem")
    sqrt_d = np.sqrt(d)
    right = w_eig.vectors / sqrt_d[:, None]
    left = w_eig.vectors * sqrt_d[:, None]
    return right, left


def diffusion_operator(ds: Dataset, cfg: KernelConfig = KernelConfig()) -> tuple[NormalizedKernel, float]:
    """Full pipeline from a point cloud to the normalized operator."""
    d2 = pairwise_sq_dists(ds)
    k, sigma = gaussian_kernel(d2, cfg)
    return normalize_kernel(k), sigma
