"""End-to-end run: curvature, adaptive counts, embeddings, quality report.

Steps, in order: estimate the curvature field, derive per-point neighbor
counts, embed with the adaptive counts and with each requested fixed count,
then score everything by residual variance. All intermediate artifacts are
persisted so every reported number can be recomputed from disk.
"""

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .adaptive import AdaptiveKConfig, adaptive_k, assignment_to_csv, grouped_adaptive_k
from .core import PointCloud, pairwise_euclidean
from .curvature import CurvatureConfig, curvature_field, field_to_csv
from .evaluation import ALGORITHMS, embed_with_graph, relative_improvement, residual_variance
from .lle import DEFAULT_REG, save_embedding_csv
from .neighbors import knn

logger = logging.getLogger(__name__)

__all__ = ["PipelineReport", "run_pipeline"]


class PipelineError(RuntimeError):
    """A pipeline step failed; the message names the step."""


@dataclass(frozen=True)
class PipelineReport:
    """Summary of one full run, serializable to stable JSON field names."""

    config: dict
    curvature: dict
    k_assignment: dict
    residual_variance: dict
    relative_improvement: dict
    artifacts: dict

    def to_json(self, path=None) -> str:
        text = json.dumps(asdict(self), sort_keys=True, indent=2)
        if path is not None:
            with open(path, "w", encoding="ascii") as fh:
                fh.write(text)
        return text


def _step(name):
    class _StepContext:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, PipelineError):
                raise PipelineError(f"step '{name}' failed: {exc}") from exc
            return False

    return _StepContext()


def run_pipeline(
    cloud: PointCloud,
    target_dim: int,
    algorithms,
    adaptive_config: AdaptiveKConfig | None = None,
    fixed_k_list=(8, 10, 12),
    out_dir="adaknn_out",
    reg: float = DEFAULT_REG,
    seed: int | None = None,
) -> PipelineReport:
    """Execute the full adaptive-neighborhood pipeline and persist artifacts.

    ``algorithms`` is a nonempty subset of {"lle", "isomap"}. The relative
    improvement per algorithm compares the adaptive run against the worst
    fixed-count run. ``seed`` is echoed into the report when the cloud came
    from a seeded generator.
    """
    algorithms = list(algorithms)
    if not algorithms:
        raise ValueError("need at least one algorithm")
    for algo in algorithms:
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
    fixed_k_list = sorted(set(int(k) for k in fixed_k_list))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if adaptive_config is None:
        adaptive_config = AdaptiveKConfig.for_dims(cloud.dim, target_dim, cloud.n)

    with _step("curvature"):
        curv_config = CurvatureConfig.for_cloud(cloud, target_dim)
        curv = curvature_field(cloud, curv_config)
        field_to_csv(curv, out / "curvature.csv")

    with _step("adaptive-k"):
        if adaptive_config.groups > 1:
            assignment = grouped_adaptive_k(curv, adaptive_config)
        else:
            assignment = adaptive_k(curv, adaptive_config)
        assignment_to_csv(assignment, out / "k_assignment.csv")

    dmat = pairwise_euclidean(cloud)
    rv_section: dict = {}
    improvements: dict = {}
    artifacts = {
        "curvature_csv": str(out / "curvature.csv"),
        "k_assignment_csv": str(out / "k_assignment.csv"),
        "embeddings": {},
    }

    with _step("embed-and-evaluate"):
        adaptive_graph = knn(cloud, assignment, dmat=dmat)
        for algo in algorithms:
            rv_section[algo] = {"fixed": {}}
            emb = embed_with_graph(cloud, algo, adaptive_graph, target_dim, "adaptive", reg=reg)
            path = out / f"embedding_{algo}_adaptive.csv"
            save_embedding_csv(emb, path)
            artifacts["embeddings"][f"{algo}_adaptive"] = str(path)
            rv = residual_variance(dmat, pairwise_euclidean(PointCloud(emb.coords)))
            rv_section[algo]["adaptive"] = rv.residual_variance

            for k in fixed_k_list:
                graph = knn(cloud, k, dmat=dmat)
                emb = embed_with_graph(cloud, algo, graph, target_dim, f"fixed({k})", reg=reg)
                path = out / f"embedding_{algo}_k{k}.csv"
                save_embedding_csv(emb, path)
                artifacts["embeddings"][f"{algo}_k{k}"] = str(path)
                rv = residual_variance(dmat, pairwise_euclidean(PointCloud(emb.coords)))
                rv_section[algo]["fixed"][str(k)] = rv.residual_variance

            if fixed_k_list:
                worst = max(rv_section[algo]["fixed"].values())
                improvements[algo] = relative_improvement(
                    worst, rv_section[algo]["adaptive"]
                )

    k_vals = assignment.k_values
    report = PipelineReport(
        config={
            "n": cloud.n,
            "ambient_dim": cloud.dim,
            "target_dim": target_dim,
            "algorithms": algorithms,
            "fixed_k": fixed_k_list,
            "seed": seed,
            "reg": reg,
            "curvature": {
                "estimation_size": curv_config.estimation_size,
                "rank": curv_config.rank,
                "aggregation": curv_config.aggregation,
            },
            "adaptive": {
                "k_init": adaptive_config.k_init,
                "delta_0": adaptive_config.delta_0,
                "k_min": adaptive_config.k_min,
                "k_max": adaptive_config.k_max,
                "groups": adaptive_config.groups,
                "baseline": adaptive_config.baseline,
                "partition": adaptive_config.partition,
            },
        },
        curvature={
            "mean": curv.mean,
            "std_dev": curv.std_dev,
            "min": float(curv.j_inf.min()),
            "max": float(curv.j_inf.max()),
        },
        k_assignment={
            "min": int(k_vals.min()),
            "median": float(np.median(k_vals)),
            "max": int(k_vals.max()),
        },
        residual_variance=rv_section,
        relative_improvement=improvements,
        artifacts=artifacts,
    )
    report.to_json(out / "report.json")
    return report
