"""Riemannian composition of two operators and their spectral embeddings.

Given two diffusion operators the two composites are

    S = W1 #_p W2          (geodesic point, midpoint by default)
    F = Log_S(W1)          (symmetric, indefinite)

S enhances common eigenvectors with similar eigenvalues, F enhances common
eigenvectors with different eigenvalues, and the sign of an F eigenvalue
says in which input its eigenvector dominates (positive: first input).
Both inputs are recoverable from the pair via ``Exp_S(+F)`` and
``Exp_S(-F)`` at the midpoint.

Near-singular operators are routed automatically onto the fixed-rank SPSD
path, where S is carried in factored form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ValidationError
from .linalg import (
    EigenSystem,
    SpdMatrix,
    SymmetricMatrix,
    eigvalsh,
    sym_eig,
    symmetrize,
)
from .spd import check_geodesic_param, exp_map, geodesic, log_map
from .spsd import (
    RANK_REL_TOL,
    SpsdFactors,
    match_ranks,
    spsd_compose_F,
    spsd_compose_S,
    spsd_factorize,
)

__all__ = [
    "CompositePair",
    "Embedding",
    "compose_S",
    "compose_F",
    "compose_pair",
    "embed",
    "embed_eigensystem",
    "embed_antisymmetric",
    "reconstruct",
    "baseline_dynamic_laplacian",
    "baseline_hat_S",
    "baseline_hat_A",
    "SPSD_ROUTING_REL_EIG",
]

# Operators whose smallest eigenvalue falls at or below this (relative to
# the largest) are numerically semi-definite and take the SPSD path.
SPSD_ROUTING_REL_EIG = 1e-10


def compose_S(w1: SpdMatrix, w2: SpdMatrix, p: float = 0.5) -> SpdMatrix:
    """Geodesic composite ``W1 #_p W2``."""
    return geodesic(w1, w2, p)


def compose_F(w1: SpdMatrix, w2: SpdMatrix, p: float = 0.5) -> SymmetricMatrix:
    """Tangent composite ``Log_{S_p}(W1)``; swapping the inputs at the
    midpoint only changes the sign."""
    return log_map(compose_S(w1, w2, p), w1)


@dataclass(frozen=True)
class CompositePair:
    """Composite operators for one input pair, plus provenance.

    On the SPD route ``s`` is an :class:`SpdMatrix`; on the SPSD route it
    is an :class:`SpsdFactors`.  ``f`` is always a dense symmetric matrix.
    """

    s: Union[SpdMatrix, SpsdFactors]
    f: SymmetricMatrix
    p: float
    route: str
    provenance: dict = field(default_factory=dict)

    @property
    def s_matrix(self) -> SymmetricMatrix:
        """Dense realization of S regardless of route."""
        if isinstance(self.s, SpsdFactors):
            return self.s.to_matrix()
        return self.s.base


def _route_for(m: SymmetricMatrix) -> str:
    w = eigvalsh(m.a)
    if w[-1] <= 0.0:
        return "spsd"
    return "spd" if w[0] / w[-1] > SPSD_ROUTING_REL_EIG else "spsd"


def compose_pair(w1, w2, p: float = 0.5, routing: str = "auto",
                 rank: int | None = None, rel_tol: float = RANK_REL_TOL,
                 provenance: dict | None = None) -> CompositePair:
    """Build S and F for one operator pair with SPD/SPSD routing.

    Parameters
    ----------
    w1, w2 : SymmetricMatrix or SpdMatrix
        The two operators, same dimension.
    routing : {"auto", "spd", "spsd"}
        ``auto`` takes the SPD path only when both operators have relative
        smallest eigenvalue above 1e-10; the routing decision is recorded
        in the provenance.
    rank, rel_tol
        Rank policy forwarded to the SPSD factorization.
    """
    p = check_geodesic_param(p)
    if routing not in ("auto", "spd", "spsd"):
        raise ValidationError(f"unknown routing {routing!r}")
    s1 = w1.base if isinstance(w1, SpdMatrix) else w1
    s2 = w2.base if isinstance(w2, SpdMatrix) else w2
    if s1.dim != s2.dim:
        raise ValidationError(f"dimension mismatch: {s1.dim} vs {s2.dim}")
    route = routing
    if routing == "auto":
        route = "spd" if _route_for(s1) == "spd" and _route_for(s2) == "spd" else "spsd"
    prov = dict(provenance or {})
    prov.update({"routing_requested": routing, "route": route, "p": p})
    if route == "spd":
        w1s = w1 if isinstance(w1, SpdMatrix) else SpdMatrix(s1)
        w2s = w2 if isinstance(w2, SpdMatrix) else SpdMatrix(s2)
        s = compose_S(w1s, w2s, p)
        f = log_map(s, w1s)
        return CompositePair(s=s, f=f, p=p, route="spd", provenance=prov)
    f1 = spsd_factorize(s1, rank=rank, rel_tol=rel_tol)
    f2 = spsd_factorize(s2, rank=rank, rel_tol=rel_tol)
    f1, f2 = match_ranks(f1, f2)
    prov["rank"] = f1.r
    if p == 0.5:
        s_f = spsd_compose_S(f1, f2)
    else:
        from .spsd import spsd_geodesic

        s_f = spsd_geodesic(f1, f2, p)
    f = spsd_compose_F(s_f, f1)
    return CompositePair(s=s_f, f=f, p=p, route="spsd", provenance=prov)


@dataclass(frozen=True)
class Embedding:
    """Selected eigenvectors (columns, unit norm) and their eigenvalues."""

    values: np.ndarray
    vectors: np.ndarray
    selection: str

    @property
    def m(self) -> int:
        return self.values.shape[0]


def embed_eigensystem(eig: EigenSystem, m: int, selection: str = "value") -> Embedding:
    """Select ``m`` leading eigenpairs from a precomputed decomposition.

    ``selection="value"`` takes the largest eigenvalues (the S view),
    ``"abs"`` the largest in absolute value (the F view), and ``"signed"``
    the ``m`` most positive plus the ``m`` most negative, merged in
    descending absolute value.  Ties in absolute value are broken by
    signed value descending, then by position.
    """
    n = eig.dim
    if not 1 <= m <= n:
        raise ValidationError(f"embedding dimension must be in [1, {n}], got {m}")
    values, vectors = eig.values, eig.vectors
    # re-derive the orderings we need from the value-sorted decomposition
    pos_order = np.lexsort((np.arange(n), -values))
    if selection == "value":
        take = pos_order[:m]
    elif selection == "abs":
        abs_order = np.lexsort((np.arange(n), -values, -np.abs(values)))
        take = abs_order[:m]
    elif selection == "signed":
        desc = pos_order
        asc = desc[::-1]
        pos = [i for i in desc if values[i] > 0][:m]
        neg = [i for i in asc if values[i] < 0][:m]
        chosen = np.array(pos + neg, dtype=np.int64)
        if chosen.size == 0:
            raise ValidationError("no nonzero eigenvalues to select")
        sub = np.lexsort((chosen, -values[chosen], -np.abs(values[chosen])))
        take = chosen[sub]
    else:
        raise ValidationError(f"unknown selection {selection!r}")
    return Embedding(values=values[take].copy(), vectors=vectors[:, take].copy(),
                     selection=selection)


def embed(op, m: int, selection: str = "value") -> Embedding:
    """Spectral embedding of a symmetric operator (see
    :func:`embed_eigensystem` for the selection rules)."""
    if isinstance(op, EigenSystem):
        return embed_eigensystem(op, m, selection)
    return embed_eigensystem(sym_eig(op, "value"), m, selection)


def embed_antisymmetric(a: np.ndarray, m: int) -> Embedding:
    """SVD-based embedding for the antisymmetric baseline operator."""
    a = np.asarray(a, dtype=np.float64)
    if not 1 <= m <= a.shape[0]:
        raise ValidationError(f"embedding dimension must be in [1, {a.shape[0]}]")
    u, s, _ = np.linalg.svd(a)
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return Embedding(values=s[:m].copy(), vectors=(u * signs)[:, :m].copy(),
                     selection="singular")


def reconstruct(pair: CompositePair) -> tuple[SpdMatrix, SpdMatrix]:
    """Recover ``(W1, W2)`` from a midpoint pair via ``Exp_S(+F)`` and
    ``Exp_S(-F)``; the second identity is the geodesic midpoint symmetry
    ``S W1^{-1} S = W2`` and only holds at p = 0.5."""
    if pair.route != "spd":
        raise ValidationError("reconstruction is defined on the SPD route only")
    if pair.p != 0.5:
        raise ValidationError("reconstruction requires the midpoint pair (p = 0.5)")
    s = pair.s
    w1 = exp_map(s, pair.f)
    w2 = exp_map(s, SymmetricMatrix(-pair.f.a))
    return w1, w2


def baseline_dynamic_laplacian(w1: SymmetricMatrix, w2: SymmetricMatrix) -> SymmetricMatrix:
    """Two-frame dynamic Laplacian ``L^T L`` with ``L = W1 W2``."""
    if w1.dim != w2.dim:
        raise ValidationError(f"dimension mismatch: {w1.dim} vs {w2.dim}")
    l = w1.a @ w2.a
    return symmetrize(l.T @ l)


def baseline_hat_S(w1: SymmetricMatrix, w2: SymmetricMatrix) -> SymmetricMatrix:
    """Additive common-component baseline ``W1 W2^T + W2 W1^T``."""
    if w1.dim != w2.dim:
        raise ValidationError(f"dimension mismatch: {w1.dim} vs {w2.dim}")
    prod = w1.a @ w2.a.T
    return symmetrize(prod + prod.T)


def baseline_hat_A(w1: SymmetricMatrix, w2: SymmetricMatrix) -> np.ndarray:
    """Antisymmetric difference baseline ``W1 W2^T - W2 W1^T``; analyzed
    through its singular vectors (see :func:`embed_antisymmetric`)."""
    if w1.dim != w2.dim:
        raise ValidationError(f"dimension mismatch: {w1.dim} vs {w2.dim}")
    prod = w1.a @ w2.a.T
    out = prod - prod.T
    return (out - out.T) / 2.0
