"""Batch command-line front end.

Subcommands chain the pipeline stages: ``gen`` (synthetic datasets),
``kernel`` (diffusion operators), ``compose`` (one operator pair),
``tree`` (the dyadic multi-resolution tree), ``cluster`` (k-means on an
embedding column), ``verify`` (the oracle suites) and ``plotdata``
(plot-ready CSV extraction).

Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 verification failure.  All randomness flows from ``--seed``; reruns
with identical flags and ``--threads 1`` are bitwise identical.  The
``RMRA_OUT`` environment variable overrides every ``--out`` directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import NumericalError, RmraError, ValidationError, VerificationError

_VERSION = "0.1.0"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); map onto exit 1
        raise ValidationError(message)


def _set_thread_env(argv) -> None:
    """Pin BLAS thread pools before numpy is imported so --threads also
    bounds library-internal parallelism."""
    threads = "1"
    for i, arg in enumerate(argv):
        if arg == "--threads" and i + 1 < len(argv):
            threads = argv[i + 1]
        elif arg.startswith("--threads="):
            threads = arg.split("=", 1)[1]
    for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, threads)


def _out_dir(args) -> Path:
    out = os.environ.get("RMRA_OUT", args.out)
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _manifest_flags(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _write_manifest(outdir: Path, command: str, args, extra: dict | None = None) -> None:
    from . import io

    manifest = {
        "command": command,
        "version": _VERSION,
        "flags": _manifest_flags(args),
    }
    if extra:
        manifest.update(extra)
    io.write_json(outdir / "manifest.json", manifest)


def _add_common(p: argparse.ArgumentParser, default_out: str) -> None:
    p.add_argument("--out", default=default_out, help="output directory")
    p.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads (1 is the determinism reference)")


# --- gen ----------------------------------------------------------------------

def cmd_gen(args) -> int:
    import numpy as np

    from . import datagen, io

    outdir = _out_dir(args)
    extra: dict = {"kind": args.kind}
    if args.kind in ("toy-spd", "toy-spsd"):
        pair = datagen.toy_spd_pair() if args.kind == "toy-spd" else datagen.toy_spsd_pair()
        io.write_matrix(outdir / "M1.rmra", pair.m1.a)
        io.write_matrix(outdir / "M2.rmra", pair.m2.a)
        io.write_matrix(outdir / "Psi.rmra", pair.psi)
        extra["files"] = ["M1.rmra", "M2.rmra", "Psi.rmra"]
    elif args.kind == "gyre":
        cfg = datagen.GyreConfig(n=args.n, t=args.t, seed=args.seed,
                                 c1=args.c1, c2=args.c2,
                                 integrator=args.integrator)
        traj = datagen.double_gyre(cfg)
        frames_dir = outdir / "frames"
        frames_dir.mkdir(exist_ok=True)
        names = []
        for k in range(traj.t):
            name = f"frame_{k + 1:04d}.csv"
            io.write_matrix_csv(frames_dir / name, traj.frames[k])
            names.append(name)
        extra.update({"frames_dir": "frames", "files": names,
                      "dt": cfg.dt, "n_points": cfg.n, "t": cfg.t})
        if args.gif_frames:
            gif_dir = outdir / "gif"
            gif_dir.mkdir(exist_ok=True)
            ids = np.arange(cfg.n, dtype=np.float64)
            color = traj.frames[0, :, 0]  # initial x location
            for k in range(traj.t):
                rows = np.column_stack([ids, traj.frames[k], color])
                io.write_matrix_csv(gif_dir / f"frame_{k + 1:04d}.csv", rows)
    elif args.kind in ("tori-common", "tori-unique"):
        variant = "common" if args.kind == "tori-common" else "unique"
        cfg = datagen.TorusConfig(n=args.n, seed=args.seed, variant=variant)
        sample = datagen.tori(cfg)
        io.write_matrix_csv(outdir / "X1.csv", sample.x1.points)
        io.write_matrix_csv(outdir / "X2.csv", sample.x2.points)
        io.write_matrix_csv(outdir / "angles.csv", sample.theta)
        extra.update({"files": ["X1.csv", "X2.csv", "angles.csv"],
                      "variant": variant})
    else:
        raise ValidationError(f"unknown generator kind {args.kind!r}")
    _write_manifest(outdir, "gen", args, extra)
    return 0


# --- kernel -------------------------------------------------------------------

def _kernel_config(args):
    from .diffusion import KernelConfig

    if args.sigma is not None:
        return KernelConfig(rule="fixed", sigma=args.sigma)
    return KernelConfig(rule="median", bandwidth_scale=args.bandwidth_scale)


def cmd_kernel(args) -> int:
    from . import io
    from .diffusion import Dataset, diffusion_operator

    cfg = _kernel_config(args)
    outdir = _out_dir(args)
    src = Path(args.data)
    if src.is_dir():
        paths = io.frame_paths(src)
    else:
        paths = [src]
    sigmas, names = [], []
    for k, path in enumerate(paths):
        ds = Dataset(io.read_dataset(path))
        nk, sigma = diffusion_operator(ds, cfg)
        name = f"W_{k + 1:04d}.rmra" if len(paths) > 1 else "W.rmra"
        io.write_matrix(outdir / name, nk.w.a)
        sigmas.append(sigma)
        names.append(name)
    _write_manifest(outdir, "kernel", args,
                    {"inputs": [str(p) for p in paths], "files": names,
                     "sigmas": sigmas})
    return 0


# --- compose ------------------------------------------------------------------

def _write_embedding_csv(path, emb) -> None:
    from . import io

    header = ",".join(
        f"lambda_{k + 1}={val:.17g}" for k, val in enumerate(emb.values)
    )
    import numpy as np

    rows = "\n".join(
        ",".join(io.FLOAT_FMT % x for x in row) for row in np.asarray(emb.vectors)
    )
    Path(path).write_text(header + "\n" + rows + "\n")


def _write_spectrum_csv(path, values) -> None:
    from . import io

    Path(path).write_text("\n".join(io.FLOAT_FMT % v for v in values) + "\n")


def cmd_compose(args) -> int:
    import numpy as np

    from . import io
    from .composite import (
        baseline_dynamic_laplacian,
        baseline_hat_A,
        baseline_hat_S,
        compose_pair,
        embed,
        embed_antisymmetric,
    )
    from .linalg import SymmetricMatrix, sym_eig

    outdir = _out_dir(args)
    w1 = SymmetricMatrix(io.load_matrix_auto(args.w1))
    w2 = SymmetricMatrix(io.load_matrix_auto(args.w2))
    pair = compose_pair(w1, w2, p=args.p, routing=args.routing,
                        provenance={"w1": str(args.w1), "w2": str(args.w2)})
    m = min(args.m, w1.dim)
    io.write_matrix(outdir / "S.rmra", pair.s_matrix.a)
    io.write_matrix(outdir / "F.rmra", pair.f.a)
    s_eig = sym_eig(pair.s_matrix, "value")
    f_eig = sym_eig(pair.f, "value")
    _write_spectrum_csv(outdir / "S_spectrum.csv", s_eig.values)
    _write_spectrum_csv(outdir / "F_spectrum.csv", f_eig.values)
    _write_embedding_csv(outdir / "S_embedding.csv", embed(s_eig, m, "value"))
    _write_embedding_csv(outdir / "F_embedding.csv",
                         embed(f_eig, m, args.f_selection))
    extra = {"route": pair.route, "provenance": pair.provenance,
             "files": ["S.rmra", "F.rmra", "S_spectrum.csv", "F_spectrum.csv",
                       "S_embedding.csv", "F_embedding.csv"]}
    if args.baseline:
        if args.baseline == "dynamic-laplacian":
            op = baseline_dynamic_laplacian(w1, w2)
            emb = embed(op, m, "value")
            values = sym_eig(op, "value").values
        elif args.baseline == "hat-s":
            op = baseline_hat_S(w1, w2)
            emb = embed(op, m, "value")
            values = sym_eig(op, "value").values
        else:
            a = baseline_hat_A(w1, w2)
            emb = embed_antisymmetric(a, m)
            values = np.linalg.svd(a, compute_uv=False)
            op = None
        stem = "baseline_" + args.baseline.replace("-", "_")
        if op is not None:
            io.write_matrix(outdir / f"{stem}.rmra", op.a)
        else:
            io.write_matrix(outdir / f"{stem}.rmra", a)
        _write_spectrum_csv(outdir / f"{stem}_spectrum.csv", values)
        _write_embedding_csv(outdir / f"{stem}_embedding.csv", emb)
        extra["baseline"] = args.baseline
    _write_manifest(outdir, "compose", args, extra)
    return 0


# --- tree ---------------------------------------------------------------------

def cmd_tree(args) -> int:
    from . import io
    from .composite import embed
    from .linalg import SymmetricMatrix, sym_eig
    from .tree import build_tree, save_tree, stream_tree_to_dir

    outdir = _out_dir(args)
    paths = io.frame_paths(Path(args.kernels), suffix=".rmra")
    ops = [SymmetricMatrix(io.read_matrix(p)) for p in paths]
    n = ops[0].dim

    def node_hook(node, directory):
        if args.m <= 0:
            return
        m = min(args.m, n)
        s_emb = embed(sym_eig(node.s_matrix, "value"), m, "value")
        f_emb = embed(sym_eig(node.f, "value"), m, "abs")
        _write_embedding_csv(directory / f"emb_S_L{node.level}_t{node.frame}.csv", s_emb)
        _write_embedding_csv(directory / f"emb_F_L{node.level}_t{node.frame}.csv", f_emb)

    if args.streaming:
        stream_tree_to_dir(ops, outdir, p=args.p, routing=args.routing,
                           threads=args.threads, node_hook=node_hook)
    else:
        tree = build_tree(ops, p=args.p, routing=args.routing,
                          threads=args.threads)
        save_tree(tree, outdir)
        for node in tree.all_nodes():
            node_hook(node, outdir)
    # the tree writer produced its own manifest; wrap it with provenance
    tree_manifest = io.read_json(outdir / "manifest.json")
    tree_manifest["command"] = "tree"
    tree_manifest["version"] = _VERSION
    tree_manifest["flags"] = _manifest_flags(args)
    tree_manifest["inputs"] = [str(p) for p in paths]
    io.write_json(outdir / "manifest.json", tree_manifest)
    return 0


# --- cluster ------------------------------------------------------------------

def _read_embedding_csv(path):
    import numpy as np

    lines = Path(path).read_text().strip().split("\n")
    header = lines[0].split(",")
    values = np.array([float(cell.split("=", 1)[1]) for cell in header])
    vectors = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return values, vectors


def cmd_cluster(args) -> int:
    import numpy as np

    from . import io
    from .cluster import kmeans

    outdir = _out_dir(args)
    _, vectors = _read_embedding_csv(args.embedding)
    if not 1 <= args.column <= vectors.shape[1]:
        raise ValidationError(
            f"column must be in [1, {vectors.shape[1]}], got {args.column}"
        )
    coords = vectors[:, args.column - 1]
    labels, _ = kmeans(coords, args.k, seed=args.seed)
    rows = np.column_stack([np.arange(labels.shape[0]), labels]).astype(np.int64)
    text = "\n".join(f"{i},{l}" for i, l in rows) + "\n"
    (outdir / "labels.csv").write_text(text)
    _write_manifest(outdir, "cluster", args,
                    {"files": ["labels.csv"],
                     "cluster_sizes": np.bincount(labels, minlength=args.k).tolist()})
    return 0


# --- verify -------------------------------------------------------------------

def cmd_verify(args) -> int:
    from . import io, verify

    outdir = _out_dir(args)
    reports = []
    if args.suite in ("toy", "all"):
        reports.extend(verify.run_toy_suite())
    if args.suite in ("theorems", "all"):
        rep1, rep2 = verify.run_common_spectrum_trials(
            n_trials=args.seeds, seed=args.seed)
        reports.extend([rep1, rep2])
        reports.append(verify.run_equivalent_forms_trials(
            n_trials=args.seeds, seed=args.seed))
        reports.append(verify.run_reconstruction_trials(
            n_trials=args.seeds, seed=args.seed))
        reports.extend(verify.run_pseudo_s_trials(
            n_trials=args.seeds, seed=args.seed))
        reports.append(verify.run_pseudo_f_sweep(seed=args.seed))
    payload = {"reports": [r.to_json() for r in reports],
               "pass": all(r.passed for r in reports)}
    io.write_json(outdir / "verify_report.json", payload)
    for rep in reports:
        status = "pass" if rep.passed else "FAIL"
        print(f"[{status}] {rep.oracle}: max_residual={rep.max_residual:.3e} "
              f"budget={rep.budget:.3e} instances={rep.instances}")
    if not payload["pass"]:
        raise VerificationError("one or more oracle checks failed")
    return 0


# --- plotdata -----------------------------------------------------------------

def cmd_plotdata(args) -> int:
    import numpy as np

    from . import io
    from .composite import embed
    from .linalg import SymmetricMatrix, sym_eig
    from .tree import covered_range

    outdir = _out_dir(args)
    tree_dir = Path(args.tree)
    which = args.which.upper()
    if which not in ("S", "F"):
        raise ValidationError("--which must be S or F")
    op_path = tree_dir / f"{which}_L{args.level}_t{args.frame}.rmra"
    if not op_path.exists():
        raise ValidationError(f"no such tree node file: {op_path}")
    op = SymmetricMatrix(io.read_matrix(op_path))
    selection = "value" if which == "S" else "abs"
    emb = embed(sym_eig(op, "value"), min(args.eig, op.dim), selection)
    column = emb.vectors[:, args.eig - 1]

    manifest = io.read_json(tree_dir / "manifest.json")
    lo, hi = covered_range(args.level, args.frame)
    hi = min(hi, manifest["T"])
    if args.times:
        times = sorted({int(tok) for tok in args.times.split(",")})
    else:
        times = sorted({int(round(x)) for x in np.linspace(lo, hi, args.num_times)})
    bad = [t for t in times if not lo <= t <= hi]
    if bad:
        raise ValidationError(
            f"times {bad} fall outside the node's covered range [{lo}, {hi}]"
        )
    frames = io.frame_paths(Path(args.frames))
    names = []
    ids = np.arange(op.dim, dtype=np.float64)
    for t in times:
        pts = io.read_dataset(frames[t - 1])
        if pts.shape[0] != op.dim:
            raise ValidationError(
                f"frame {t} has {pts.shape[0]} points, operator has {op.dim}"
            )
        rows = np.column_stack([ids, pts, column])
        name = f"plot_{which}_L{args.level}_t{args.frame}_eig{args.eig}_frame{t:04d}.csv"
        io.write_matrix_csv(outdir / name, rows)
        names.append(name)
    _write_manifest(outdir, "plotdata", args,
                    {"files": names, "covered": [lo, hi], "times": times})
    return 0


# --- parser -------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="rmra", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("kind", choices=["toy-spd", "toy-spsd", "gyre",
                                    "tori-common", "tori-unique"])
    p.add_argument("--n", type=int, default=2500, help="points / trajectories")
    p.add_argument("--t", type=int, default=256, help="frames (gyre)")
    p.add_argument("--c1", type=float, default=2.0)
    p.add_argument("--c2", type=float, default=10.0)
    p.add_argument("--integrator", choices=["rk4", "euler"], default="rk4")
    p.add_argument("--gif-frames", action="store_true",
                   help="also emit per-frame (id, x, y, color) CSVs")
    _add_common(p, "gen_out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("kernel", help="diffusion operators from datasets")
    p.add_argument("data", help="dataset file or directory of frame files")
    p.add_argument("--bandwidth-scale", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=None,
                   help="fixed bandwidth, bypassing the median rule")
    _add_common(p, "kernel_out")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("compose", help="composite operators for one pair")
    p.add_argument("w1")
    p.add_argument("w2")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--m", type=int, default=8, help="embedding dimension")
    p.add_argument("--routing", choices=["auto", "spd", "spsd"], default="auto")
    p.add_argument("--f-selection", choices=["abs", "signed"], default="abs")
    p.add_argument("--baseline",
                   choices=["dynamic-laplacian", "hat-s", "hat-a"], default=None)
    _add_common(p, "compose_out")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("tree", help="dyadic multi-resolution operator tree")
    p.add_argument("kernels", help="directory of W_*.rmra files")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--m", type=int, default=8,
                   help="embedding dimension per node (0 disables)")
    p.add_argument("--routing", choices=["auto", "spd", "spsd"], default="auto")
    p.add_argument("--streaming", action="store_true",
                   help="write level by level instead of holding all nodes")
    _add_common(p, "tree_out")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("cluster", help="k-means on one embedding column")
    p.add_argument("embedding", help="embedding CSV")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--column", type=int, default=2,
                   help="1-based embedding column (default: second eigenvector)")
    _add_common(p, "cluster_out")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("verify", help="run the oracle suites")
    p.add_argument("--suite", choices=["theorems", "toy", "all"], default="all")
    p.add_argument("--seeds", type=int, default=100,
                   help="number of seeded trials per oracle")
    _add_common(p, "verify_out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plotdata", help="plot-ready CSV for one tree node")
    p.add_argument("--tree", required=True, help="tree output directory")
    p.add_argument("--frames", required=True, help="directory of frame files")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--frame", type=int, required=True)
    p.add_argument("--which", default="S", help="S or F")
    p.add_argument("--eig", type=int, default=2, help="1-based eigenvector")
    p.add_argument("--times", default=None,
                   help="comma-separated source frame indices")
    p.add_argument("--num-times", type=int, default=8,
                   help="equispaced frames when --times is absent")
    _add_common(p, "plot_out")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    _set_thread_env(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 3
    except RmraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
