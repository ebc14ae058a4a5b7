"""Deterministic generators for the synthetic experiments.

Everything is seeded explicitly; the same configuration always produces
bitwise-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffusion import Dataset
from .errors import ValidationError
from .linalg import SymmetricMatrix, symmetrize

__all__ = [
    "ToyPair",
    "toy_spd_pair",
    "toy_spsd_pair",
    "GyreConfig",
    "TrajectorySet",
    "gyre_velocity",
    "transition_weight",
    "double_gyre",
    "TorusConfig",
    "ToriSample",
    "tori",
]

# Shared +-1/2 eigenvector matrix of the 4x4 toy instances (columns are
# psi_1..psi_4).
_TOY_PSI = 0.5 * np.array(
    [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
    ]
)


@dataclass(frozen=True)
class ToyPair:
    """A 4x4 operator pair sharing the eigenvector basis ``psi``."""

    m1: SymmetricMatrix
    m2: SymmetricMatrix
    psi: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray


def _toy_pair(lambda1, lambda2) -> ToyPair:
    lam1 = np.asarray(lambda1, dtype=np.float64)
    lam2 = np.asarray(lambda2, dtype=np.float64)
    m1 = symmetrize((_TOY_PSI * lam1) @ _TOY_PSI.T)
    m2 = symmetrize((_TOY_PSI * lam2) @ _TOY_PSI.T)
    return ToyPair(m1=m1, m2=m2, psi=_TOY_PSI.copy(), lambda1=lam1, lambda2=lam2)


def toy_spd_pair() -> ToyPair:
    """The 4x4 SPD pair with spectra (0.5, 1, 0.01, 0.2) and
    (0.01, 1, 0.5, 0.2) on the shared basis."""
    return _toy_pair([0.5, 1.0, 0.01, 0.2], [0.01, 1.0, 0.5, 0.2])


def toy_spsd_pair() -> ToyPair:
    """The rank-3 variant: the fourth eigenvalue is zero in both matrices."""
    return _toy_pair([0.5, 1.0, 0.01, 0.0], [0.01, 1.0, 0.5, 0.0])


# --- transitory double gyre ---------------------------------------------------

@dataclass(frozen=True)
class GyreConfig:
    """Transitory double-gyre flow on [0, 1]^2 over t in [0, 1]."""

    n: int = 2500
    t: int = 256
    dt: float = 1.0 / 256.0
    c1: float = 2.0
    c2: float = 10.0
    seed: int = 0
    integrator: str = "rk4"

    def __post_init__(self):
        if self.n < 1 or self.t < 2 or not self.dt > 0:
            raise ValidationError("need n >= 1, t >= 2, dt > 0")
        if self.integrator not in ("rk4", "euler"):
            raise ValidationError(f"unknown integrator {self.integrator!r}")


@dataclass(frozen=True)
class TrajectorySet:
    """T frames of N points with persistent identity: shape (T, N, d)."""

    frames: np.ndarray

    @property
    def t(self) -> int:
        return self.frames.shape[0]

    @property
    def n_points(self) -> int:
        return self.frames.shape[1]

    def frame(self, t: int) -> Dataset:
        """Frame as a dataset; ``t`` is 1-based."""
        if not 1 <= t <= self.t:
            raise ValidationError(f"frame {t} out of range [1, {self.t}]")
        return Dataset(self.frames[t - 1])


def transition_weight(t):
    """Smooth-step blend g(t) = t^2 (3 - 2t) between the two gyre regimes."""
    t = np.asarray(t, dtype=np.float64)
    return t * t * (3.0 - 2.0 * t)


def gyre_velocity(x, y, t, c1: float = 2.0, c2: float = 10.0):
    """Analytic velocity field of the stream function
    ``H = (1 - g(t)) c1 sin(2 pi x) sin(pi y) + g(t) c2 sin(pi x) sin(2 pi y)``
    with ``xdot = -dH/dy`` and ``ydot = dH/dx`` (closed-form partials, no
    numerical differentiation)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    g = transition_weight(t)
    pi = np.pi
    dh1_dy = c1 * pi * np.sin(2.0 * pi * x) * np.cos(pi * y)
    dh1_dx = 2.0 * c1 * pi * np.cos(2.0 * pi * x) * np.sin(pi * y)
    dh2_dy = 2.0 * c2 * pi * np.sin(pi * x) * np.cos(2.0 * pi * y)
    dh2_dx = c2 * pi * np.cos(pi * x) * np.sin(2.0 * pi * y)
    vx = -((1.0 - g) * dh1_dy + g * dh2_dy)
    vy = (1.0 - g) * dh1_dx + g * dh2_dx
    return vx, vy


def _velocity_state(state: np.ndarray, t: float, c1: float, c2: float) -> np.ndarray:
    vx, vy = gyre_velocity(state[:, 0], state[:, 1], t, c1, c2)
    return np.column_stack([vx, vy])


def double_gyre(cfg: GyreConfig) -> TrajectorySet:
    """Integrate N seeded trajectories; frame k is the state at
    ``t = (k - 1) dt`` and trajectories may leave [0, 1]^2 (the field is
    defined everywhere, no clamping)."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    state = rng.uniform(0.0, 1.0, size=(cfg.n, 2))
    frames = np.empty((cfg.t, cfg.n, 2), dtype=np.float64)
    frames[0] = state
    h = cfg.dt
    for k in range(1, cfg.t):
        t0 = (k - 1) * h
        if cfg.integrator == "euler":
            state = state + h * _velocity_state(state, t0, cfg.c1, cfg.c2)
        else:
            k1 = _velocity_state(state, t0, cfg.c1, cfg.c2)
            k2 = _velocity_state(state + 0.5 * h * k1, t0 + 0.5 * h, cfg.c1, cfg.c2)
            k3 = _velocity_state(state + 0.5 * h * k2, t0 + 0.5 * h, cfg.c1, cfg.c2)
            k4 = _velocity_state(state + h * k3, t0 + h, cfg.c1, cfg.c2)
            state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        frames[k] = state
    return TrajectorySet(frames=frames)


# --- 3-dimensional tori -------------------------------------------------------

@dataclass(frozen=True)
class TorusConfig:
    """Two correspondence-aligned samples of 3-tori embedded in R^4.

    The ``common`` variant shares all three angles between the views (with
    the roles of the first two swapped); the ``unique`` variant replaces
    the third angle of the second view by an independent fourth one.
    """

    n: int = 2000
    r: float = 2.0
    big_r: float = 7.0
    tilde_r: float = 15.0
    seed: int = 0
    variant: str = "common"

    def __post_init__(self):
        if not 0 < self.r < self.big_r < self.tilde_r:
            raise ValidationError("radii must satisfy 0 < r < R < R~")
        if self.variant not in ("common", "unique"):
            raise ValidationError(f"unknown variant {self.variant!r}")


@dataclass(frozen=True)
class ToriSample:
    x1: Dataset
    x2: Dataset
    theta: np.ndarray  # (n, 3) for common, (n, 4) for unique


def _torus_embed(inner: np.ndarray, outer: np.ndarray, azimuth: np.ndarray,
                 r: float, big_r: float, tilde_r: float) -> np.ndarray:
    ring = big_r + r * np.cos(inner)
    rail = tilde_r + ring * np.cos(outer)
    return np.column_stack([
        rail * np.cos(azimuth),
        rail * np.sin(azimuth),
        ring * np.sin(outer),
        r * np.sin(inner),
    ])


def tori(cfg: TorusConfig) -> ToriSample:
    """Sample the two tori with point correspondence through the angles."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n_angles = 4 if cfg.variant == "unique" else 3
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(cfg.n, n_angles))
    th1, th2, th3 = theta[:, 0], theta[:, 1], theta[:, 2]
    x1 = _torus_embed(th2, th1, th3, cfg.r, cfg.big_r, cfg.tilde_r)
    azimuth2 = theta[:, 3] if cfg.variant == "unique" else th3
    x2 = _torus_embed(th1, th2, azimuth2, cfg.r, cfg.big_r, cfg.tilde_r)
    return ToriSample(x1=Dataset(x1), x2=Dataset(x2), theta=theta)
