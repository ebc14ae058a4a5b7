"""Fixed-rank SPSD geometry: factor pairs, principal angles, Grassmann
geodesics, and the fixed-rank variants of the composite operators.

A rank-r SPSD matrix is carried as ``(V, Lambda)`` with ``V`` an N x r
orthonormal basis of its range and ``Lambda`` an r x r SPD block.  The
geodesic between two such matrices is approximated by rotating the range
along the Grassmann geodesic while transporting the SPD blocks along the
affine-invariant geodesic; the exact closed form is unknown.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .linalg import SpdMatrix, SymmetricMatrix, eigvalsh, sym_eig, symmetrize, _eigh
from .spd import check_geodesic_param, geodesic, log_map

__all__ = [
    "SpsdFactors",
    "PrincipalAngles",
    "spsd_factorize",
    "principal_angles",
    "grassmann_geodesic",
    "spsd_geodesic",
    "spsd_compose_S",
    "spsd_compose_F",
    "match_ranks",
    "RANK_REL_TOL",
]

# Relative eigenvalue threshold of the default rank policy; retained
# eigenvalues must exceed RANK_REL_TOL * lambda_max.
RANK_REL_TOL = 1e-10

# Principal angles with sin(theta) below this are treated as exactly zero
# when pseudo-inverting sin(Theta).
_SIN_FLOOR = 1e-12

_ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class SpsdFactors:
    """Rank-r factorization ``W = V Lambda V^T``.

    ``v`` has orthonormal columns spanning the range; ``lam`` is the r x r
    SPD block (diagonal when produced by :func:`spsd_factorize`, generally
    dense after a geodesic step).
    """

    v: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.v, dtype=np.float64))
        lam = np.ascontiguousarray(np.asarray(self.lam, dtype=np.float64))
        if v.ndim != 2 or lam.shape != (v.shape[1], v.shape[1]):
            raise ValidationError(
                f"inconsistent factor shapes {v.shape} and {lam.shape}"
            )
        if v.shape[1] > v.shape[0]:
            raise ValidationError("rank cannot exceed the ambient dimension")
        gram_err = np.linalg.norm(v.T @ v - np.eye(v.shape[1]))
        if gram_err > 1e-10:
            raise ValidationError(
                f"basis columns are not orthonormal (||V^T V - I||_F = {gram_err:.3e})"
            )
        lam = (lam + lam.T) / 2.0
        w = eigvalsh(lam)
        if w[0] <= 0.0:
            raise NumericalError(
                f"factor block is not positive definite (min eigenvalue {w[0]:.6e})"
            )
        v.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return self.v.shape[0]

    @property
    def r(self) -> int:
        return self.v.shape[1]

    def to_matrix(self) -> SymmetricMatrix:
        """Assemble the dense N x N matrix ``V Lambda V^T``."""
        return symmetrize(self.v @ self.lam @ self.v.T)

    def canonical(self) -> tuple[np.ndarray, np.ndarray]:
        """``(V', d)`` with the block diagonalized: ``V diag(d) V'^T`` equals
        the carried matrix and ``d`` is descending."""
        w, q = _eigh(self.lam)
        order = np.arange(w.shape[0])[::-1]
        return self.v @ q[:, order], w[order]

    def truncated(self, r: int) -> "SpsdFactors":
        """Drop the smallest block eigenvalues to reach rank ``r``."""
        if not 1 <= r <= self.r:
            raise ValidationError(f"cannot truncate rank {self.r} to {r}")
        if r == self.r:
            return self
        v, d = self.canonical()
        return SpsdFactors(v[:, :r], np.diag(d[:r]))


@dataclass(frozen=True)
class PrincipalAngles:
    """SVD frames and angles between two r-dimensional subspaces.

    ``V2^T V1 = O2 diag(sigma) O1^T`` with ``sigma`` descending in [0, 1]
    and ``theta = arccos(sigma)`` in [0, pi/2].
    """

    o1: np.ndarray
    o2: np.ndarray
    sigma: np.ndarray
    theta: np.ndarray


def spsd_factorize(m: SymmetricMatrix, rank: int | None = None,
                   rel_tol: float = RANK_REL_TOL) -> SpsdFactors:
    """Top-r eigenpairs of a (numerically) SPSD matrix as factors.

    ``rank=None`` retains every eigenvalue above ``rel_tol * lambda_max``;
    an explicit rank must stay above the same positivity floor.  Negative
    drift down to ``-RANK_REL_TOL * lambda_max`` in the discarded tail is
    tolerated and never enters the retained block.
    """
    eig = sym_eig(m, "value")
    lam_max = float(eig.values[0])
    if lam_max <= 0.0:
        raise NumericalError("matrix has no positive eigenvalue to retain")
    if float(eig.values[-1]) < -RANK_REL_TOL * lam_max:
        raise NumericalError(
            f"matrix is not positive semi-definite: eigenvalue "
            f"{eig.values[-1]:.6e} is below the drift floor"
        )
    floor = rel_tol * lam_max
    available = int(np.sum(eig.values > floor))
    if rank is None:
        r = available
    else:
        r = int(rank)
        if not 1 <= r <= m.dim:
            raise ValidationError(f"rank must be in [1, {m.dim}], got {r}")
        if r > available:
            raise NumericalError(
                f"requested rank {r} exceeds the numerically available rank "
                f"{available} (positivity floor {floor:.6e})"
            )
    return SpsdFactors(eig.vectors[:, :r], np.diag(eig.values[:r]))


def principal_angles(v1: np.ndarray, v2: np.ndarray) -> PrincipalAngles:
    """Principal angles between ``span(v1)`` and ``span(v2)``.

    Cosines are clamped into [0, 1] before the arccos; floating-point
    overshoot of the overlap SVD is routine.
    """
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    if v1.shape != v2.shape:
        raise ValidationError(f"shape mismatch: {v1.shape} vs {v2.shape}")
    for name, v in (("first", v1), ("second", v2)):
        err = np.linalg.norm(v.T @ v - np.eye(v.shape[1]))
        if err > _ORTHO_TOL:
            raise ValidationError(
                f"{name} basis is not orthonormal (||V^T V - I||_F = {err:.3e})"
            )
    u, s, vh = np.linalg.svd(v2.T @ v1)
    sigma = np.clip(s, 0.0, 1.0)
    return PrincipalAngles(o1=vh.T, o2=u, sigma=sigma, theta=np.arccos(sigma))


def grassmann_geodesic(pa: PrincipalAngles, v1: np.ndarray, v2: np.ndarray,
                       p: float) -> np.ndarray:
    """Point at parameter ``p`` on the Grassmann geodesic between the spans.

    ``U(p) = U1 cos(Theta p) + X sin(Theta p)`` with ``U1 = V1 O1``,
    ``U2 = V2 O2`` and ``X = (I - U1 U1^T) U2 sin(Theta)^+``; zero angles
    contribute zero columns to ``X`` through the pseudo-inverse floor.  The
    result is re-orthonormalized by a sign-fixed thin QR, since the
    cos/sin recombination drifts off the Stiefel manifold.
    """
    p = check_geodesic_param(p)
    u1 = v1 @ pa.o1
    u2 = v2 @ pa.o2
    sin_theta = np.sin(pa.theta)
    nonzero = sin_theta > _SIN_FLOOR
    inv_sin = np.where(nonzero, 1.0 / np.where(nonzero, sin_theta, 1.0), 0.0)
    x = (u2 - u1 @ (u1.T @ u2)) * inv_sin
    up = u1 * np.cos(pa.theta * p) + x * np.sin(pa.theta * p)
    q, rr = np.linalg.qr(up)
    signs = np.sign(np.diag(rr))
    signs[signs == 0] = 1.0
    return q * signs


def _geodesic_parts(g1: SpsdFactors, g2: SpsdFactors, p: float):
    """Shared machinery of the fixed-rank geodesic: the rotated range
    ``U(p)`` and the SPD blocks ``R(p), R1, R2`` in the SVD frames."""
    if g1.n != g2.n:
        raise ValidationError(f"ambient dimension mismatch: {g1.n} vs {g2.n}")
    if g1.r != g2.r:
        raise ValidationError(
            f"rank mismatch: {g1.r} vs {g2.r}; re-factorize both inputs at "
            "the smaller rank first"
        )
    v1, d1 = g1.canonical()
    v2, d2 = g2.canonical()
    pa = principal_angles(v1, v2)
    up = grassmann_geodesic(pa, v1, v2, p)
    r1 = SpdMatrix(symmetrize((pa.o1.T * d1) @ pa.o1))
    r2 = SpdMatrix(symmetrize((pa.o2.T * d2) @ pa.o2))
    rp = geodesic(r1, r2, p)
    return up, rp, r1, r2


def spsd_geodesic(w1f: SpsdFactors, w2f: SpsdFactors, p: float) -> SpsdFactors:
    """Approximated fixed-rank geodesic, returned in factored form."""
    up, rp, _, _ = _geodesic_parts(w1f, w2f, p)
    return SpsdFactors(up, rp.a)


def spsd_compose_S(w1f: SpsdFactors, w2f: SpsdFactors) -> SpsdFactors:
    """Fixed-rank midpoint operator (the composite S on the SPSD path)."""
    return spsd_geodesic(w1f, w2f, 0.5)


def spsd_compose_F(sf: SpsdFactors, w1f: SpsdFactors) -> SymmetricMatrix:
    """Fixed-rank composite F: transport the log map of the SPD blocks
    along the Grassmann geodesic from ``range(S)`` to ``range(W1)``.

    Returns a dense symmetric N x N matrix of rank at most r.
    """
    u_end, _, r_s, r_w1 = _geodesic_parts(sf, w1f, 1.0)
    inner = log_map(r_s, r_w1)
    return symmetrize(u_end @ inner.a @ u_end.T)


def match_ranks(f1: SpsdFactors, f2: SpsdFactors) -> tuple[SpsdFactors, SpsdFactors]:
    """Truncate both factorizations to the smaller of the two ranks."""
    r = min(f1.r, f2.r)
    return f1.truncated(r), f2.truncated(r)
