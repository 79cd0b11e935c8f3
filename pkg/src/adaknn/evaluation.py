"""Embedding quality: residual variance and parameter sweeps.

Residual variance is one minus the squared Pearson correlation between the
input and output pairwise-distance entries; lower is better. Sweeps rerun the
embedding across neighbor counts (or group counts) and report the argmin.
"""

import json
import logging
from dataclasses import dataclass, replace

import numpy as np

from .adaptive import AdaptiveKConfig, grouped_adaptive_k
from .core import DistanceMatrix, PointCloud, pairwise_euclidean
from .curvature import CurvatureConfig, curvature_field
from .errors import DisconnectedGraphError, NumericalError
from .isomap import isomap_embed
from .lle import DEFAULT_REG, Embedding, lle_embed, reconstruction_weights
from .neighbors import knn

logger = logging.getLogger(__name__)

__all__ = [
    "ResidualVarianceReport",
    "SweepEntry",
    "SweepReport",
    "residual_variance",
    "embedding_residual_variance",
    "relative_improvement",
    "embed_with_graph",
    "sweep_k",
    "sweep_groups",
]

ALGORITHMS = ("lle", "isomap")


@dataclass(frozen=True)
class ResidualVarianceReport:
    """Correlation and residual variance over distance-matrix entries."""

    rho: float
    residual_variance: float
    n_pairs: int


@dataclass(frozen=True)
class SweepEntry:
    """One sweep point: parameter value, quality, or a failure marker."""

    value: int
    residual_variance: float | None
    failure: str | None = None


@dataclass(frozen=True)
class SweepReport:
    """Residual variance across a swept parameter, with its argmin."""

    algorithm: str
    parameter_name: str
    entries: tuple[SweepEntry, ...]
    argmin: int | None

    def to_json(self, path=None) -> str:
        payload = {
            "algorithm": self.algorithm,
            "parameter_name": self.parameter_name,
            "entries": [
                {
                    "value": e.value,
                    "residual_variance": e.residual_variance,
                    **({"failure": e.failure} if e.failure else {}),
                }
                for e in self.entries
            ],
            "argmin": self.argmin,
        }
        text = json.dumps(payload, sort_keys=True, indent=2)
        if path is not None:
            with open(path, "w", encoding="ascii") as fh:
                fh.write(text)
        return text

    def to_csv(self, path) -> None:
        """Two plot-ready columns: parameter value, residual variance."""
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(f"{self.parameter_name},residual_variance\n")
            for e in self.entries:
                rv = "" if e.residual_variance is None else format(e.residual_variance, ".17g")
                fh.write(f"{e.value},{rv}\n")


def residual_variance(dx: DistanceMatrix, dy: DistanceMatrix) -> ResidualVarianceReport:
    """1 - rho^2 over the strict upper-triangle entries of both matrices.

    The diagonal and the mirrored lower triangle are excluded so the n
    guaranteed-zero and duplicated pairs cannot bias the correlation. Zero
    variance on either side defines rho = 0 (residual variance 1).
    """
    if dx.n != dy.n:
        raise ValueError(f"distance matrices disagree on size: {dx.n} vs {dy.n}")
    iu = np.triu_indices(dx.n, k=1)
    x = dx.values[iu]
    y = dy.values[iu]
    x_dev = x - x.mean()
    y_dev = y - y.mean()
    x_var = float(x_dev @ x_dev)
    y_var = float(y_dev @ y_dev)
    if x_var == 0.0 or y_var == 0.0:
        rho = 0.0
    else:
        rho = float(x_dev @ y_dev) / np.sqrt(x_var * y_var)
        rho = float(np.clip(rho, -1.0, 1.0))
    return ResidualVarianceReport(rho, 1.0 - rho * rho, x.shape[0])


def embedding_residual_variance(
    cloud: PointCloud,
    embedding: Embedding,
    dx: DistanceMatrix | None = None,
) -> ResidualVarianceReport:
    """Residual variance of an embedding against its source cloud.

    Input distances default to Euclidean; pass a geodesic ``dx`` to compare
    against graph distances instead.
    """
    if dx is None:
        dx = pairwise_euclidean(cloud)
    dy = pairwise_euclidean(PointCloud(embedding.coords))
    return residual_variance(dx, dy)


def relative_improvement(resi_max: float, resi_optimal: float) -> float:
    """Percentage drop from the worst to the best residual variance.

    Negative when ``resi_optimal`` exceeds ``resi_max``.
    """
    if resi_max <= 0.0:
        raise ValueError(f"resi_max must be positive, got {resi_max}")
    if resi_optimal < 0.0:
        raise ValueError(f"resi_optimal must be >= 0, got {resi_optimal}")
    return 100.0 * (resi_max - resi_optimal) / resi_max


def embed_with_graph(
    cloud: PointCloud,
    algorithm: str,
    graph,
    target_dim: int,
    k_policy_tag: str,
    reg: float = DEFAULT_REG,
) -> Embedding:
    """Run one embedding algorithm over a prebuilt neighbor graph."""
    if algorithm == "lle":
        weights = reconstruction_weights(cloud, graph, reg=reg)
        return lle_embed(weights, target_dim, k_policy_tag=k_policy_tag)
    if algorithm == "isomap":
        return isomap_embed(cloud, graph, target_dim, k_policy_tag=k_policy_tag)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def _finish_sweep(algorithm: str, parameter_name: str, entries: list[SweepEntry]) -> SweepReport:
    valid = [e for e in entries if e.residual_variance is not None]
    argmin = None
    if valid:
        argmin = min(valid, key=lambda e: e.residual_variance).value
    return SweepReport(algorithm, parameter_name, tuple(entries), argmin)


def sweep_k(
    cloud: PointCloud,
    algorithm: str,
    k_range,
    target_dim: int,
    reg: float = DEFAULT_REG,
) -> SweepReport:
    """Residual variance for each fixed neighbor count in ``k_range``.

    Counts whose graph leaves the geodesic computation disconnected (or whose
    eigenproblem degenerates) are recorded with a failure marker instead of a
    value.
    """
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise ValueError("k_range must contain at least one value")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    dmat = pairwise_euclidean(cloud)
    entries = []
    for k in ks:
        graph = knn(cloud, k, dmat=dmat)
        try:
            emb = embed_with_graph(cloud, algorithm, graph, target_dim, f"fixed({k})", reg=reg)
        except (DisconnectedGraphError, NumericalError) as exc:
            logger.warning("k=%d failed: %s", k, exc)
            entries.append(SweepEntry(k, None, failure=str(exc)))
            continue
        rv = residual_variance(dmat, pairwise_euclidean(PointCloud(emb.coords)))
        entries.append(SweepEntry(k, rv.residual_variance))
    return _finish_sweep(algorithm, "K", entries)


def sweep_groups(
    cloud: PointCloud,
    algorithm: str,
    group_range,
    target_dim: int,
    config: AdaptiveKConfig | None = None,
    reg: float = DEFAULT_REG,
) -> SweepReport:
    """Residual variance of the grouped adaptive rule for each group count."""
    gs = sorted(set(int(g) for g in group_range))
    if not gs:
        raise ValueError("group_range must contain at least one value")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    if config is None:
        config = AdaptiveKConfig.for_dims(cloud.dim, target_dim, cloud.n)
    curv = curvature_field(cloud, CurvatureConfig.for_cloud(cloud, target_dim))
    dmat = pairwise_euclidean(cloud)
    entries = []
    for g in gs:
        assignment = grouped_adaptive_k(curv, replace(config, groups=g))
        graph = knn(cloud, assignment, dmat=dmat)
        try:
            emb = embed_with_graph(
                cloud, algorithm, graph, target_dim, f"adaptive(groups={g})", reg=reg
            )
        except (DisconnectedGraphError, NumericalError) as exc:
            logger.warning("groups=%d failed: %s", g, exc)
            entries.append(SweepEntry(g, None, failure=str(exc)))
            continue
        rv = residual_variance(dmat, pairwise_euclidean(PointCloud(emb.coords)))
        entries.append(SweepEntry(g, rv.residual_variance))
    return _finish_sweep(algorithm, "G", entries)
