"""File formats used across the package.

Binary matrix format (``.rmra``): magic bytes ``RMRA``, format version as
u16, rows as u32, cols as u32, then the row-major float64 payload.  All
integers and floats are little-endian.

CSV matrices are headerless and comma-separated; floats are written with
17 significant digits so a write/read round trip is exact.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import ValidationError

MAGIC = b"RMRA"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHII")
FLOAT_FMT = "%.17g"


def write_matrix(path, a) -> None:
    """Write a 2-D float64 array in the binary matrix format."""
    a = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
    if a.ndim != 2:
        raise ValidationError(f"expected a 2-D array, got shape {a.shape}")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, a.shape[0], a.shape[1]))
        fh.write(a.astype("<f8", copy=False).tobytes(order="C"))


def read_matrix(path) -> np.ndarray:
    """Read a binary matrix file; validates magic and version."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValidationError(f"{path}: truncated matrix file")
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValidationError(f"{path}: bad magic bytes {magic!r}")
    if version != FORMAT_VERSION:
        raise ValidationError(f"{path}: unsupported format version {version}")
    expected = _HEADER.size + rows * cols * 8
    if len(raw) != expected:
        raise ValidationError(
            f"{path}: payload size mismatch ({len(raw)} bytes, expected {expected})"
        )
    payload = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    return payload.reshape(rows, cols).astype(np.float64, copy=True)


def write_matrix_csv(path, a) -> None:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValidationError(f"expected a 2-D array, got shape {a.shape}")
    np.savetxt(path, a, fmt=FLOAT_FMT, delimiter=",")


def read_matrix_csv(path) -> np.ndarray:
    a = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return a


def load_matrix_auto(path) -> np.ndarray:
    """Load a matrix by extension: ``.rmra`` binary, anything else CSV."""
    path = Path(path)
    if path.suffix == ".rmra":
        return read_matrix(path)
    return read_matrix_csv(path)


# --- SPSD factor pairs ------------------------------------------------------

def write_spsd_factors(stem, v, lam) -> None:
    """Serialize a rank-r factorization as two matrix files plus a JSON
    sidecar ``{n, r}``.  ``stem`` is a path without extension."""
    stem = Path(stem)
    v = np.asarray(v, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    write_matrix(stem.with_suffix(".V.rmra"), v)
    write_matrix(stem.with_suffix(".L.rmra"), lam)
    sidecar = {"n": int(v.shape[0]), "r": int(v.shape[1])}
    stem.with_suffix(".json").write_text(json.dumps(sidecar, sort_keys=True) + "\n")


def read_spsd_factors(stem) -> tuple[np.ndarray, np.ndarray]:
    stem = Path(stem)
    meta = json.loads(stem.with_suffix(".json").read_text())
    v = read_matrix(stem.with_suffix(".V.rmra"))
    lam = read_matrix(stem.with_suffix(".L.rmra"))
    if v.shape != (meta["n"], meta["r"]) or lam.shape != (meta["r"], meta["r"]):
        raise ValidationError(f"{stem}: factor shapes disagree with the sidecar")
    return v, lam


# --- datasets and trajectories ----------------------------------------------
#
# A dataset file is one point per row, d columns (CSV or binary matrix).
# A trajectory is either one dataset file per frame ("frame_0001.csv", ...,
# sorted lexicographically) or a single CSV whose first column is a 1-based
# frame index followed by the d coordinates; within a frame, rows appear in
# point-identity order.

def write_dataset(path, points) -> None:
    path = Path(path)
    if path.suffix == ".rmra":
        write_matrix(path, points)
    else:
        write_matrix_csv(path, points)


def read_dataset(path) -> np.ndarray:
    return load_matrix_auto(path)


def write_trajectory_csv(path, frames) -> None:
    """Single-file trajectory: rows ``frame, x_1, ..., x_d``."""
    frames = np.asarray(frames, dtype=np.float64)
    t, n, d = frames.shape
    idx = np.repeat(np.arange(1, t + 1), n).astype(np.float64)
    flat = frames.reshape(t * n, d)
    np.savetxt(path, np.column_stack([idx, flat]), fmt=FLOAT_FMT, delimiter=",")


def read_trajectory_csv(path) -> np.ndarray:
    raw = read_matrix_csv(path)
    frame_ids = raw[:, 0].astype(np.int64)
    t = int(frame_ids.max())
    if frame_ids.min() != 1:
        raise ValidationError(f"{path}: frame indices must start at 1")
    counts = np.bincount(frame_ids, minlength=t + 1)[1:]
    if np.any(counts != counts[0]):
        raise ValidationError(f"{path}: frames have unequal point counts")
    n = int(counts[0])
    order = np.argsort(frame_ids, kind="stable")
    return raw[order, 1:].reshape(t, n, raw.shape[1] - 1)


def frame_paths(directory, suffix=None) -> list[Path]:
    """Per-frame dataset files in a directory, lexicographically sorted."""
    directory = Path(directory)
    pats = [f"*{suffix}"] if suffix else ["*.rmra", "*.csv"]
    found: list[Path] = []
    for pat in pats:
        found.extend(directory.glob(pat))
    paths = sorted(set(found))
    if not paths:
        raise ValidationError(f"{directory}: no frame files found")
    return paths


def write_json(path, obj) -> None:
    """Deterministic JSON: sorted keys, no wall-clock fields."""
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())
