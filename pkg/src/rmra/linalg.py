"""Dense symmetric eigendecomposition and spectral matrix functions.

Everything downstream (geodesics, operator composition, the oracle suite)
routes through the two primitives here: :func:`sym_eig` and
:func:`matrix_function`.  The eigensolver is LAPACK's QL/QR driver for
symmetric matrices (``dsyev``), which is fully deterministic: identical
input bytes produce identical output bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import NumericalError, ValidationError

__all__ = [
    "SymmetricMatrix",
    "SpdMatrix",
    "EigenSystem",
    "symmetrize",
    "sym_eig",
    "matrix_function",
    "sqrtm",
    "invsqrtm",
    "logm",
    "expm",
    "powm",
    "DEGENERACY_REL_GAP",
]

# Eigenvalue pairs closer than this (relative to the spectral radius) are
# treated as one numerically degenerate cluster; individual eigenvectors
# inside a cluster are only defined up to rotation.
DEGENERACY_REL_GAP = 1e-10

# LAPACK's dsyev gives up after 30 QL/QR sweeps per eigenvalue.
_LAPACK_SWEEP_BUDGET = 30


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class SymmetricMatrix:
    """Dense real symmetric matrix, the universal operator carrier.

    Construction symmetrizes the input as ``(M + M^T) / 2`` (exact in IEEE
    arithmetic) and rejects non-finite entries, so ``a[i, j] == a[j, i]``
    holds bitwise for every instance.
    """

    a: np.ndarray

    def __post_init__(self):
        a = _as_square(self.a)
        if not np.all(np.isfinite(a)):
            raise ValidationError("matrix entries must be finite")
        a = (a + a.T) / 2.0
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.linalg.norm(self.a))


def symmetrize(m) -> SymmetricMatrix:
    """Return ``(M + M^T) / 2`` as a :class:`SymmetricMatrix`.

    Used after every spectral function and congruence product to stop
    floating-point drift from accumulating through chained compositions.
    """
    return SymmetricMatrix(_as_square(m))


class SpdMatrix:
    """Symmetric positive-definite matrix, validated on construction.

    Parameters
    ----------
    base : SymmetricMatrix or array_like
        The symmetric carrier.
    min_eig_tol : float, optional
        Absolute floor the smallest eigenvalue must exceed.  Defaults to
        ``1e-12 * lambda_max``.  Violation raises, it is never clamped.
    """

    __slots__ = ("base", "min_eig_tol", "eig_min", "eig_max")

    def __init__(self, base, min_eig_tol: float | None = None):
        if not isinstance(base, SymmetricMatrix):
            base = SymmetricMatrix(base)
        w = eigvalsh(base.a)
        eig_min, eig_max = float(w[0]), float(w[-1])
        if min_eig_tol is None:
            min_eig_tol = 1e-12 * eig_max
        if not eig_min > min_eig_tol:
            raise NumericalError(
                "matrix is not positive definite: smallest eigenvalue "
                f"{eig_min:.6e} is not above the floor {min_eig_tol:.6e}"
            )
        self.base = base
        self.min_eig_tol = float(min_eig_tol)
        self.eig_min = eig_min
        self.eig_max = eig_max

    @classmethod
    def from_kernel(cls, base: SymmetricMatrix) -> "SpdMatrix":
        """Wrap a Gaussian-kernel matrix.

        Such kernels are positive definite in exact arithmetic (Bochner),
        but at desk scale their trailing eigenvalues sit at the round-off
        floor and may come out of LAPACK marginally negative.  Drift down
        to ``-1e-10 * lambda_max`` is therefore accepted here; anything
        lower still raises.
        """
        if not isinstance(base, SymmetricMatrix):
            base = SymmetricMatrix(base)
        w = eigvalsh(base.a)
        return cls(base, min_eig_tol=-1e-10 * float(w[-1]) - np.finfo(np.float64).tiny)

    @property
    def a(self) -> np.ndarray:
        return self.base.a

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def rel_eig_min(self) -> float:
        """Smallest eigenvalue relative to the largest (low values mean the
        matrix is numerically semi-definite and belongs on the SPSD path)."""
        return self.eig_min / self.eig_max

    def cond(self) -> float:
        return self.eig_max / self.eig_min if self.eig_min > 0 else np.inf


@dataclass(frozen=True)
class EigenSystem:
    """Full spectral decomposition with a fixed ordering convention.

    ``vectors[:, k]`` is the unit eigenvector for ``values[k]``.  Ordering
    is ``"value"`` (descending eigenvalue) or ``"abs"`` (descending
    absolute value; ties broken by signed value descending, then by the
    original LAPACK index).  Eigenvector signs are fixed so the entry of
    largest magnitude in each column is non-negative.  ``degenerate[k]``
    flags members of numerically degenerate clusters (relative gap below
    :data:`DEGENERACY_REL_GAP`), whose individual vectors are only defined
    up to rotation within the cluster.
    """

    values: np.ndarray
    vectors: np.ndarray
    ordering: str
    degenerate: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def _eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return scipy.linalg.eigh(a, driver="ev", check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(
            "symmetric eigensolver failed to converge within the fixed "
            f"budget of {_LAPACK_SWEEP_BUDGET} QL/QR sweeps per eigenvalue "
            f"(dim={a.shape[0]}): {exc}"
        ) from exc


def eigvalsh(a: np.ndarray) -> np.ndarray:
    """Eigenvalues only, ascending, same deterministic LAPACK driver."""
    try:
        return scipy.linalg.eigh(a, driver="ev", eigvals_only=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(
            "symmetric eigensolver failed to converge within the fixed "
            f"budget of {_LAPACK_SWEEP_BUDGET} QL/QR sweeps per eigenvalue "
            f"(dim={a.shape[0]}): {exc}"
        ) from exc


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so the entry of largest magnitude (first
    such index on ties) is non-negative."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _degenerate_flags(asc_values: np.ndarray) -> np.ndarray:
    """Flags (in ascending-value order) for members of clusters whose
    neighbour gap is below DEGENERACY_REL_GAP * spectral radius."""
    n = asc_values.shape[0]
    flags = np.zeros(n, dtype=bool)
    if n < 2:
        return flags
    scale = np.max(np.abs(asc_values))
    if scale == 0.0:
        flags[:] = True
        return flags
    close = np.diff(asc_values) < DEGENERACY_REL_GAP * scale
    flags[:-1] |= close
    flags[1:] |= close
    return flags


def sym_eig(m, ordering: str = "value") -> EigenSystem:
    """Spectral decomposition of a symmetric matrix.

    Parameters
    ----------
    m : SymmetricMatrix, SpdMatrix, or array_like
        Matrix to decompose (arrays are symmetrized first).
    ordering : {"value", "abs"}
        ``"value"`` sorts by descending eigenvalue, ``"abs"`` by descending
        absolute value.

    Deterministic: two calls on identical input bytes return identical
    output bytes.
    """
    if isinstance(m, SpdMatrix):
        a = m.a
    elif isinstance(m, SymmetricMatrix):
        a = m.a
    else:
        a = symmetrize(m).a
    if ordering not in ("value", "abs"):
        raise ValidationError(f"unknown eigenvalue ordering {ordering!r}")
    w, v = _eigh(a)
    flags_asc = _degenerate_flags(w)
    idx = np.arange(w.shape[0])
    if ordering == "value":
        order = np.lexsort((idx, -w))
    else:
        order = np.lexsort((idx, -w, -np.abs(w)))
    return EigenSystem(
        values=w[order],
        vectors=_fix_signs(v[:, order]),
        ordering=ordering,
        degenerate=flags_asc[order],
    )


def matrix_function(m, f: Callable[[np.ndarray], np.ndarray], fname: str = "f") -> SymmetricMatrix:
    """Apply a scalar function to a symmetric matrix through its spectrum.

    Computes ``V f(Lambda) V^T`` and re-symmetrizes.  ``f`` must be finite
    on the spectrum; a non-finite value raises a domain error naming the
    offending eigenvalue.
    """
    if isinstance(m, (SymmetricMatrix, SpdMatrix)):
        a = m.a
    else:
        a = symmetrize(m).a
    w, v = _eigh(a)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=np.float64)
    bad = ~np.isfinite(fw)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise NumericalError(
            f"{fname} is undefined at eigenvalue {w[k]:.6e} (index {k} of "
            "the ascending spectrum)"
        )
    return symmetrize((v * fw) @ v.T)


def sqrtm(m) -> SymmetricMatrix:
    """Principal matrix square root via the spectrum."""
    return matrix_function(m, np.sqrt, "sqrt")


def invsqrtm(m) -> SymmetricMatrix:
    """Inverse matrix square root; requires a strictly positive spectrum."""
    return matrix_function(m, lambda w: 1.0 / np.sqrt(w), "1/sqrt")


def logm(m) -> SymmetricMatrix:
    """Matrix logarithm; requires a strictly positive spectrum."""
    return matrix_function(m, np.log, "log")


def expm(m) -> SymmetricMatrix:
    """Matrix exponential of a symmetric matrix."""
    return matrix_function(m, np.exp, "exp")


def powm(m, p: float) -> SymmetricMatrix:
    """Matrix power ``M^p`` via the spectrum."""
    return matrix_function(m, lambda w: np.power(w, p), f"power {p}")
