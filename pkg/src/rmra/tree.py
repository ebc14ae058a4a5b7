"""Dyadic multi-resolution tree of composite operators.

Level 1 composes consecutive frame pairs; every higher level composes the
S operators of its two children (F never propagates upward):

    S_t^(l) = S_{2t-1}^(l-1) # S_{2t}^(l-1)
    F_t^(l) = Log_{S_t^(l)}(S_{2t-1}^(l-1))

S acts as a low-pass analogue over time and F as the high-pass detail; an
F eigenvalue's sign localizes its component in time (negative: dominant in
the first half of the node's window, positive: second half).

The route (SPD or fixed-rank SPSD) is decided once per tree so every node
lives on the same manifold.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .composite import Embedding, SPSD_ROUTING_REL_EIG, embed
from .errors import ValidationError
from .linalg import SpdMatrix, SymmetricMatrix, eigvalsh
from .spd import check_geodesic_param, geodesic, log_map
from .spsd import (
    RANK_REL_TOL,
    SpsdFactors,
    match_ranks,
    spsd_compose_F,
    spsd_factorize,
    spsd_geodesic,
)
from . import io

__all__ = [
    "TreeNode",
    "OperatorTree",
    "build_tree",
    "tree_embeddings",
    "covered_range",
    "save_tree",
    "stream_tree_to_dir",
    "load_tree_manifest",
]


@dataclass(frozen=True)
class TreeNode:
    """One (S, F) pair at (level, frame); frames are 1-based."""

    level: int
    frame: int
    s: Union[SpdMatrix, SpsdFactors]
    f: SymmetricMatrix

    @property
    def s_matrix(self) -> SymmetricMatrix:
        if isinstance(self.s, SpsdFactors):
            return self.s.to_matrix()
        return self.s.base

    @property
    def covered(self) -> tuple[int, int]:
        return covered_range(self.level, self.frame)


def covered_range(level: int, frame: int) -> tuple[int, int]:
    """Source frames (1-based, inclusive) covered by node (level, frame)."""
    if level < 1 or frame < 1:
        raise ValidationError(f"invalid node index ({level}, {frame})")
    span = 2 ** level
    return (frame - 1) * span + 1, frame * span


@dataclass(frozen=True)
class OperatorTree:
    """Complete dyadic tree over T = 2^m frames: level l holds T / 2^l
    nodes, T - 1 nodes in total."""

    t: int
    n: int
    p: float
    route: str
    levels: list[list[TreeNode]] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def node(self, level: int, frame: int) -> TreeNode:
        if not 1 <= level <= self.depth:
            raise ValidationError(f"level {level} out of range [1, {self.depth}]")
        row = self.levels[level - 1]
        if not 1 <= frame <= len(row):
            raise ValidationError(
                f"frame {frame} out of range [1, {len(row)}] at level {level}"
            )
        return row[frame - 1]

    @property
    def root(self) -> TreeNode:
        return self.levels[-1][0]

    def all_nodes(self):
        for row in self.levels:
            yield from row


def _check_power_of_two(t: int) -> int:
    if t < 2 or t & (t - 1):
        largest = 1 << (max(t, 1).bit_length() - 1)
        raise ValidationError(
            f"sequence length must be a power of two, got {t}; truncate the "
            f"sequence to the largest 2^m <= {t} ({largest}) first"
        )
    return int(np.log2(t))


def _decide_route(ops: Sequence[SymmetricMatrix], routing: str) -> str:
    if routing in ("spd", "spsd"):
        return routing
    if routing != "auto":
        raise ValidationError(f"unknown routing {routing!r}")
    for op in ops:
        w = eigvalsh(op.a)
        if w[-1] <= 0.0 or w[0] / w[-1] <= SPSD_ROUTING_REL_EIG:
            return "spsd"
    return "spd"


def _spd_node(level, frame, child1: SpdMatrix, child2: SpdMatrix, p) -> TreeNode:
    s = geodesic(child1, child2, p)
    f = log_map(s, child1)
    return TreeNode(level=level, frame=frame, s=s, f=f)


def _spsd_node(level, frame, child1: SpsdFactors, child2: SpsdFactors, p) -> TreeNode:
    c1, c2 = match_ranks(child1, child2)
    s = spsd_geodesic(c1, c2, p)
    f = spsd_compose_F(s, c1)
    return TreeNode(level=level, frame=frame, s=s, f=f)


def _map_level(worker, pairs, threads: int):
    # nodes within a level are independent; results are assembled in frame
    # order so concurrency cannot change the output
    if threads <= 1 or len(pairs) <= 1:
        return [worker(*args) for args in pairs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda args: worker(*args), pairs))


def build_tree(ops: Sequence[SymmetricMatrix], p: float = 0.5,
               routing: str = "auto", rank: int | None = None,
               rel_tol: float = RANK_REL_TOL, threads: int = 1) -> OperatorTree:
    """Build the complete operator tree over T = 2^m frame operators."""
    p = check_geodesic_param(p)
    t = len(ops)
    depth = _check_power_of_two(t)
    n = ops[0].dim
    for i, op in enumerate(ops):
        if op.dim != n:
            raise ValidationError(
                f"operator {i} has dimension {op.dim}, expected {n}"
            )
    route = _decide_route(ops, routing)
    if route == "spd":
        current = [op if isinstance(op, SpdMatrix) else SpdMatrix(op) for op in ops]
        make = _spd_node
    else:
        base = [op.base if isinstance(op, SpdMatrix) else op for op in ops]
        current = [spsd_factorize(op, rank=rank, rel_tol=rel_tol) for op in base]
        make = _spsd_node
    levels: list[list[TreeNode]] = []
    for level in range(1, depth + 1):
        pairs = [
            (level, tt + 1, current[2 * tt], current[2 * tt + 1])
            for tt in range(len(current) // 2)
        ]
        nodes = _map_level(lambda lv, fr, c1, c2: make(lv, fr, c1, c2, p), pairs, threads)
        levels.append(nodes)
        current = [node.s for node in nodes]
    return OperatorTree(t=t, n=n, p=p, route=route, levels=levels)


def tree_embeddings(tree: OperatorTree, m: int, s_selection: str = "value",
                    f_selection: str = "abs") -> dict[tuple[int, int], tuple[Embedding, Embedding]]:
    """Per-node (S, F) embedding pairs keyed by (level, frame)."""
    if not 1 <= m <= tree.n:
        raise ValidationError(f"embedding dimension must be in [1, {tree.n}]")
    out: dict[tuple[int, int], tuple[Embedding, Embedding]] = {}
    for node in tree.all_nodes():
        s_emb = embed(node.s_matrix, m, s_selection)
        f_emb = embed(node.f, m, f_selection)
        out[(node.level, node.frame)] = (s_emb, f_emb)
    return out


def _node_filenames(level: int, frame: int) -> tuple[str, str]:
    return f"S_L{level}_t{frame}.rmra", f"F_L{level}_t{frame}.rmra"


def _manifest(tree_t: int, n: int, p: float, route: str, depth: int) -> dict:
    levels = []
    for level in range(1, depth + 1):
        frames = []
        for frame in range(1, tree_t // (2 ** level) + 1):
            s_name, f_name = _node_filenames(level, frame)
            lo, hi = covered_range(level, frame)
            frames.append({
                "frame": frame,
                "covered": [lo, hi],
                "s_file": s_name,
                "f_file": f_name,
            })
        levels.append({"level": level, "nodes": frames})
    return {"N": n, "T": tree_t, "p": p, "routing": route, "levels": levels}


def save_tree(tree: OperatorTree, directory) -> Path:
    """Serialize a tree as a manifest plus one dense matrix file per
    operator (S nodes on the SPSD path are densified)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for node in tree.all_nodes():
        s_name, f_name = _node_filenames(node.level, node.frame)
        io.write_matrix(directory / s_name, node.s_matrix.a)
        io.write_matrix(directory / f_name, node.f.a)
    io.write_json(directory / "manifest.json",
                  _manifest(tree.t, tree.n, tree.p, tree.route, tree.depth))
    return directory


def stream_tree_to_dir(ops: Sequence[SymmetricMatrix], directory,
                       p: float = 0.5, routing: str = "auto",
                       rank: int | None = None, rel_tol: float = RANK_REL_TOL,
                       threads: int = 1, node_hook=None) -> Path:
    """Build and write the tree level by level, retaining only the previous
    level's S operators in memory (for N too large to hold all nodes).
    ``node_hook(node, directory)`` runs once per finished node."""
    p = check_geodesic_param(p)
    t = len(ops)
    depth = _check_power_of_two(t)
    n = ops[0].dim
    route = _decide_route(ops, routing)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if route == "spd":
        current = [op if isinstance(op, SpdMatrix) else SpdMatrix(op) for op in ops]
        make = _spd_node
    else:
        base = [op.base if isinstance(op, SpdMatrix) else op for op in ops]
        current = [spsd_factorize(op, rank=rank, rel_tol=rel_tol) for op in base]
        make = _spsd_node
    for level in range(1, depth + 1):
        pairs = [
            (level, tt + 1, current[2 * tt], current[2 * tt + 1])
            for tt in range(len(current) // 2)
        ]
        nodes = _map_level(lambda lv, fr, c1, c2: make(lv, fr, c1, c2, p), pairs, threads)
        for node in nodes:
            s_name, f_name = _node_filenames(node.level, node.frame)
            io.write_matrix(directory / s_name, node.s_matrix.a)
            io.write_matrix(directory / f_name, node.f.a)
            if node_hook is not None:
                node_hook(node, directory)
        current = [node.s for node in nodes]
    io.write_json(directory / "manifest.json", _manifest(t, n, p, route, depth))
    return directory


def load_tree_manifest(directory) -> dict:
    return io.read_json(Path(directory) / "manifest.json")
