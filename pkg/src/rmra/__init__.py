"""Riemannian multi-resolution analysis of multivariate time series.

The pipeline: diffusion operators from point clouds (:mod:`rmra.diffusion`),
Riemannian composition of operator pairs on the SPD and fixed-rank SPSD
manifolds (:mod:`rmra.spd`, :mod:`rmra.spsd`, :mod:`rmra.composite`), a
dyadic operator tree over temporal sequences (:mod:`rmra.tree`), and a
numerical oracle suite for the spectral guarantees (:mod:`rmra.verify`).
"""

from .errors import NumericalError, RmraError, ValidationError, VerificationError
from .linalg import EigenSystem, SpdMatrix, SymmetricMatrix, sym_eig, symmetrize

__version__ = "0.1.0"

__all__ = [
    "EigenSystem",
    "NumericalError",
    "RmraError",
    "SpdMatrix",
    "SymmetricMatrix",
    "ValidationError",
    "VerificationError",
    "sym_eig",
    "symmetrize",
    "__version__",
]
