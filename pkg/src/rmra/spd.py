"""Affine-invariant Riemannian geometry of the SPD cone.

Closed forms used throughout:

* geodesic     ``W1^{1/2} (W1^{-1/2} W2 W1^{-1/2})^p W1^{1/2}``
* distance     ``|| log(W1^{-1/2} W2 W1^{-1/2}) ||_F``
* exp map      ``W^{1/2} exp(W^{-1/2} D W^{-1/2}) W^{1/2}``
* log map      ``W^{1/2} log(W^{-1/2} V W^{-1/2}) W^{1/2}``

All computations route through eigendecompositions of the congruence-
transformed inner matrix, which preserves symmetry by construction.  The
two-matrix Riemannian (Frechet) mean is the geodesic midpoint; no
iterative n-matrix mean is provided.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError, ValidationError
from .linalg import SpdMatrix, SymmetricMatrix, _eigh, symmetrize

__all__ = [
    "geodesic",
    "riemannian_distance",
    "exp_map",
    "log_map",
    "frechet_midpoint",
    "check_geodesic_param",
    "COND_LIMIT",
]

# Base-point inverses amplify noise quadratically through the chained
# congruence products; refuse to proceed past this condition number.
COND_LIMIT = 1e12


def check_geodesic_param(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"geodesic parameter must lie in [0, 1], got {p}")
    return p


def _check_pair(w1: SpdMatrix, w2) -> None:
    if w1.dim != w2.dim:
        raise ValidationError(
            f"dimension mismatch: {w1.dim} vs {w2.dim}"
        )


def _base_point_roots(w: SpdMatrix) -> tuple[np.ndarray, np.ndarray]:
    """``(W^{1/2}, W^{-1/2})`` from one eigendecomposition of the base
    point, with the conditioning guard applied."""
    if w.cond() > COND_LIMIT:
        raise NumericalError(
            f"base point is too ill-conditioned (cond={w.cond():.3e} > "
            f"{COND_LIMIT:.0e}); route through the fixed-rank path instead"
        )
    vals, vecs = _eigh(w.a)
    if vals[0] <= 0.0:
        raise NumericalError(
            f"base point lost positive definiteness (min eigenvalue {vals[0]:.6e})"
        )
    sq = (vecs * np.sqrt(vals)) @ vecs.T
    isq = (vecs / np.sqrt(vals)) @ vecs.T
    return sq, isq


def _inner_spectrum(isq: np.ndarray, other: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    inner = isq @ other @ isq
    inner = (inner + inner.T) / 2.0
    return _eigh(inner)


def geodesic(w1: SpdMatrix, w2: SpdMatrix, p: float) -> SpdMatrix:
    """Point at parameter ``p`` on the unique geodesic from ``w1`` to ``w2``."""
    p = check_geodesic_param(p)
    _check_pair(w1, w2)
    sq, isq = _base_point_roots(w1)
    vals, vecs = _inner_spectrum(isq, w2.a)
    if vals[0] <= 0.0:
        raise NumericalError(
            f"geodesic target is not positive definite relative to the base "
            f"(inner eigenvalue {vals[0]:.6e})"
        )
    inner_p = (vecs * vals**p) @ vecs.T
    return SpdMatrix(symmetrize(sq @ inner_p @ sq))


def riemannian_distance(w1: SpdMatrix, w2: SpdMatrix) -> float:
    """Affine-invariant distance (the arc length of the geodesic)."""
    _check_pair(w1, w2)
    _, isq = _base_point_roots(w1)
    vals, _ = _inner_spectrum(isq, w2.a)
    if vals[0] <= 0.0:
        raise NumericalError(
            f"distance undefined: inner eigenvalue {vals[0]:.6e} is not positive"
        )
    return float(np.sqrt(np.sum(np.log(vals) ** 2)))


def exp_map(w: SpdMatrix, d: SymmetricMatrix) -> SpdMatrix:
    """Exponential map of tangent vector ``d`` at base point ``w``."""
    _check_pair(w, d)
    sq, isq = _base_point_roots(w)
    vals, vecs = _inner_spectrum(isq, d.a)
    inner_exp = (vecs * np.exp(vals)) @ vecs.T
    return SpdMatrix(symmetrize(sq @ inner_exp @ sq))


def log_map(w: SpdMatrix, v: SpdMatrix) -> SymmetricMatrix:
    """Logarithmic map of ``v`` at base point ``w`` (inverse of exp_map)."""
    _check_pair(w, v)
    sq, isq = _base_point_roots(w)
    vals, vecs = _inner_spectrum(isq, v.a)
    if vals[0] <= 0.0:
        raise NumericalError(
            f"log map domain error: inner eigenvalue {vals[0]:.6e} is not positive"
        )
    inner_log = (vecs * np.log(vals)) @ vecs.T
    return symmetrize(sq @ inner_log @ sq)


def frechet_midpoint(w1: SpdMatrix, w2: SpdMatrix) -> SpdMatrix:
    """Riemannian mean of two SPD matrices: the geodesic midpoint."""
    return geodesic(w1, w2, 0.5)
