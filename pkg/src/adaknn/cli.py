"""Command-line front end: one subcommand per pipeline stage.

Exit codes: 0 on success, 1 on usage errors, 2 on compute errors (bad input
files, disconnected graphs, degenerate eigenproblems). Diagnostics go to
stderr; data goes to files or stdout. Output paths passed without a
directory default into ``$ADAKNN_OUT_DIR`` when that variable is set.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from ._jit import set_thread_count
from .adaptive import (
    AdaptiveKConfig,
    adaptive_k,
    assignment_to_csv,
    grouped_adaptive_k,
)
from .core import generate_swiss_roll, load_csv, pairwise_euclidean, save_csv
from .curvature import CurvatureConfig, curvature_field, field_to_csv, field_to_json
from .evaluation import (
    embed_with_graph,
    residual_variance,
    sweep_groups,
    sweep_k,
)
from .isomap import geodesic_distances
from .lle import DEFAULT_REG, save_embedding_csv
from .neighbors import knn
from .pipeline import run_pipeline

OUT_DIR_ENV = "ADAKNN_OUT_DIR"


class _CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _out_path(value) -> Path:
    path = Path(value)
    base = os.environ.get(OUT_DIR_ENV)
    if base and path.parent == Path("."):
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_adaptive_flags(sub):
    sub.add_argument("--k-init", type=int, default=None,
                     help="starting neighbor count before curvature adjustment (default 8)")
    sub.add_argument("--delta-0", type=float, default=None,
                     help="curvature change per neighbor step "
                          "(default: interquartile range of the curvature values)")
    sub.add_argument("--k-min", type=int, default=None,
                     help="lower clamp for neighbor counts (default: target dim + 1)")
    sub.add_argument("--k-max", type=int, default=None,
                     help="upper clamp for neighbor counts (default: 6 * ambient dim, capped at n-1)")
    sub.add_argument("--groups", type=int, default=1,
                     help="share one neighbor count per curvature group (default 1 group)")
    sub.add_argument("--baseline", choices=("global", "local"), default="global",
                     help="curvature baseline each point is compared against")
    sub.add_argument("--partition", choices=("quantile", "index"), default="quantile",
                     help="how groups are formed when --groups > 1")


def _add_curvature_flags(sub):
    sub.add_argument("--est-size", type=int, default=None,
                     help="neighborhood size for curvature estimation "
                          "(default: 8 if ambient < target dim, else 4 * target dim)")
    sub.add_argument("--rank", type=int, default=None,
                     help="tangent-basis rank (default: target dimension)")
    sub.add_argument("--aggregation", choices=("max", "mean"), default="max",
                     help="combine per-neighbor curvature samples by max or mean")


def _curvature_config(cloud, args) -> CurvatureConfig:
    config = CurvatureConfig.for_cloud(cloud, args.d, aggregation=args.aggregation)
    est = args.est_size if args.est_size is not None else config.estimation_size
    rank = args.rank if args.rank is not None else min(config.rank, est)
    return CurvatureConfig(est, rank, args.d, aggregation=args.aggregation)


def _adaptive_config(cloud, args) -> AdaptiveKConfig:
    overrides = {}
    if args.k_init is not None:
        overrides["k_init"] = args.k_init
    if args.delta_0 is not None:
        overrides["delta_0"] = args.delta_0
    if args.k_min is not None:
        overrides["k_min"] = args.k_min
    if args.k_max is not None:
        overrides["k_max"] = args.k_max
    overrides["groups"] = args.groups
    overrides["baseline"] = args.baseline
    overrides["partition"] = args.partition
    return AdaptiveKConfig.for_dims(cloud.dim, args.d, cloud.n, **overrides)


def _assignment_for(cloud, args):
    curv_config = _curvature_config(cloud, args)
    curv = curvature_field(cloud, curv_config)
    config = _adaptive_config(cloud, args)
    if config.groups > 1:
        return grouped_adaptive_k(curv, config)
    graph = None
    if config.baseline == "local":
        graph = knn(cloud, curv_config.estimation_size)
    return adaptive_k(curv, config, graph=graph)


def cmd_generate(args) -> int:
    cloud = generate_swiss_roll(args.n, args.seed)
    save_csv(cloud, _out_path(args.out))
    print(f"wrote {cloud.n} points (dim {cloud.dim}) to {args.out}", file=sys.stderr)
    return 0


def cmd_curvature(args) -> int:
    cloud = load_csv(args.infile)
    curv = curvature_field(cloud, _curvature_config(cloud, args))
    field_to_csv(curv, _out_path(args.out))
    if args.json:
        field_to_json(curv, _out_path(args.json))
    print(
        f"curvature: mean={curv.mean:.6g} std={curv.std_dev:.6g} "
        f"degenerate={int(curv.degenerate.sum())}",
        file=sys.stderr,
    )
    return 0


def cmd_adapt_k(args) -> int:
    cloud = load_csv(args.infile)
    assignment = _assignment_for(cloud, args)
    assignment_to_csv(assignment, _out_path(args.out))
    ks = assignment.k_values
    print(
        f"k assignment: min={ks.min()} median={np.median(ks):.1f} max={ks.max()}",
        file=sys.stderr,
    )
    return 0


def cmd_embed(args) -> int:
    cloud = load_csv(args.infile)
    if args.threads:
        set_thread_count(args.threads)
    if args.adaptive:
        assignment = _assignment_for(cloud, args)
        graph = knn(cloud, assignment)
        tag = "adaptive"
    else:
        graph = knn(cloud, args.k)
        tag = f"fixed({args.k})"
    emb = embed_with_graph(cloud, args.algo, graph, args.d, tag, reg=args.reg)
    save_embedding_csv(emb, _out_path(args.out))
    for note in emb.notes:
        print(f"note: {note}", file=sys.stderr)
    print(f"embedded {emb.n} points to dim {emb.dim} with {args.algo} [{tag}]", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    cloud = load_csv(args.infile)
    embedded = load_csv(args.embedding)
    if cloud.n != embedded.n:
        raise ValueError(
            f"point counts differ: {cloud.n} input rows vs {embedded.n} embedding rows"
        )
    if args.dx == "geodesic":
        if args.k is None:
            raise ValueError("--dx geodesic requires --k to build the neighbor graph")
        dx = geodesic_distances(cloud, knn(cloud, args.k))
    else:
        dx = pairwise_euclidean(cloud)
    report = residual_variance(dx, pairwise_euclidean(embedded))
    print(json.dumps({
        "rho": report.rho,
        "residual_variance": report.residual_variance,
        "n_pairs": report.n_pairs,
    }))
    return 0


def cmd_sweep_k(args) -> int:
    cloud = load_csv(args.infile)
    if args.threads:
        set_thread_count(args.threads)
    ks = range(args.k_min, args.k_max + 1, args.step)
    report = sweep_k(cloud, args.algo, ks, args.d, reg=args.reg)
    report.to_json(_out_path(args.out))
    if args.csv:
        report.to_csv(_out_path(args.csv))
    print(f"sweep K in [{args.k_min}, {args.k_max}]: argmin={report.argmin}", file=sys.stderr)
    return 0


def cmd_sweep_groups(args) -> int:
    cloud = load_csv(args.infile)
    if args.threads:
        set_thread_count(args.threads)
    config = _adaptive_config(cloud, args)
    report = sweep_groups(cloud, args.algo, args.group_values, args.d, config=config, reg=args.reg)
    report.to_json(_out_path(args.out))
    if args.csv:
        report.to_csv(_out_path(args.csv))
    print(f"sweep G over {args.group_values}: argmin={report.argmin}", file=sys.stderr)
    return 0


def cmd_pipeline(args) -> int:
    if args.infile:
        cloud = load_csv(args.infile)
        seed = None
    else:
        cloud = generate_swiss_roll(args.n, args.seed)
        seed = args.seed
    if args.threads:
        set_thread_count(args.threads)
    out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV) or "adaknn_out"
    config = _adaptive_config(cloud, args)
    report = run_pipeline(
        cloud,
        args.d,
        args.algos,
        adaptive_config=config,
        fixed_k_list=args.fixed_k,
        out_dir=out_dir,
        reg=args.reg,
        seed=seed,
    )
    print(report.to_json())
    print(f"artifacts in {out_dir}", file=sys.stderr)
    return 0


def build_parser() -> _CliParser:
    parser = _CliParser(
        prog="adaknn",
        description="Manifold embedding with curvature-adaptive neighborhood sizes.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", parents=[], help="sample a Swiss-roll point cloud to CSV")
    p.add_argument("--n", type=int, required=True, help="number of points")
    p.add_argument("--seed", type=int, default=0, help="RNG seed; same seed, same cloud")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("curvature", help="per-point curvature values to CSV")
    p.add_argument("--in", dest="infile", required=True, help="input point-cloud CSV")
    p.add_argument("--d", type=int, required=True, help="target embedding dimension")
    _add_curvature_flags(p)
    p.add_argument("--out", required=True, help="output CSV (index, value)")
    p.add_argument("--json", default=None, help="also write field and stats as JSON")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("adapt-k", help="per-point adaptive neighbor counts to CSV")
    p.add_argument("--in", dest="infile", required=True, help="input point-cloud CSV")
    p.add_argument("--d", type=int, required=True, help="target embedding dimension")
    _add_curvature_flags(p)
    _add_adaptive_flags(p)
    p.add_argument("--out", required=True, help="output CSV (index, k)")
    p.set_defaults(func=cmd_adapt_k)

    p = sub.add_parser("embed", help="embed a point cloud with LLE or Isomap")
    p.add_argument("--algo", choices=("lle", "isomap"), required=True)
    p.add_argument("--d", type=int, required=True, help="target embedding dimension")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--k", type=int, help="fixed neighbor count")
    group.add_argument("--adaptive", action="store_true", help="curvature-adaptive neighbor counts")
    _add_curvature_flags(p)
    _add_adaptive_flags(p)
    p.add_argument("--reg", type=float, default=DEFAULT_REG,
                   help="LLE weight regularization (fraction of Gram trace)")
    p.add_argument("--threads", type=int, default=None, help="bound kernel worker threads")
    p.add_argument("--in", dest="infile", required=True, help="input point-cloud CSV")
    p.add_argument("--out", required=True, help="output embedding CSV")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("eval", help="residual variance of an embedding")
    p.add_argument("--in", dest="infile", required=True, help="original point-cloud CSV")
    p.add_argument("--embedding", required=True, help="embedding CSV to score")
    p.add_argument("--dx", choices=("euclidean", "geodesic"), default="euclidean",
                   help="input-space distance used for the comparison")
    p.add_argument("--k", type=int, default=None,
                   help="neighbor count for the geodesic input distances")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep-k", help="residual variance across fixed neighbor counts")
    p.add_argument("--algo", choices=("lle", "isomap"), required=True)
    p.add_argument("--in", dest="infile", required=True, help="input point-cloud CSV")
    p.add_argument("--d", type=int, required=True, help="target embedding dimension")
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--reg", type=float, default=DEFAULT_REG)
    p.add_argument("--threads", type=int, default=None, help="bound kernel worker threads")
    p.add_argument("--out", required=True, help="output sweep-report JSON")
    p.add_argument("--csv", default=None, help="also write plot-ready two-column CSV")
    p.set_defaults(func=cmd_sweep_k)

    p = sub.add_parser("sweep-groups", help="residual variance across group counts")
    p.add_argument("--algo", choices=("lle", "isomap"), required=True)
    p.add_argument("--in", dest="infile", required=True, help="input point-cloud CSV")
    p.add_argument("--d", type=int, required=True, help="target embedding dimension")
    p.add_argument("--group-values", type=_int_list, required=True,
                   help="comma-separated group counts, e.g. 1,2,4,8")
    _add_curvature_flags(p)
    _add_adaptive_flags(p)
    p.add_argument("--reg", type=float, default=DEFAULT_REG)
    p.add_argument("--threads", type=int, default=None, help="bound kernel worker threads")
    p.add_argument("--out", required=True, help="output sweep-report JSON")
    p.add_argument("--csv", default=None, help="also write plot-ready two-column CSV")
    p.set_defaults(func=cmd_sweep_groups)

    p = sub.add_parser("pipeline", help="full run: curvature, adaptive k, embeddings, report")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="infile", help="input point-cloud CSV")
    src.add_argument("--n", type=int, help="generate a Swiss roll with this many points")
    p.add_argument("--seed", type=int, default=0, help="RNG seed when generating")
    p.add_argument("--d", type=int, required=True, help="target embedding dimension")
    p.add_argument("--algos", type=lambda s: s.split(","), default=["lle", "isomap"],
                   help="comma-separated algorithms (default: lle,isomap)")
    p.add_argument("--fixed-k", type=_int_list, default=[8, 10, 12],
                   help="comma-separated fixed neighbor counts to compare against")
    _add_curvature_flags(p)
    _add_adaptive_flags(p)
    p.add_argument("--reg", type=float, default=DEFAULT_REG)
    p.add_argument("--threads", type=int, default=None, help="bound kernel worker threads")
    p.add_argument("--out-dir", default=None,
                   help=f"artifact directory (default: ${OUT_DIR_ENV} or ./adaknn_out)")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"adaknn: error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
