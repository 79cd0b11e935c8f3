"""Per-point curvature proxy from local tangent-frame geometry.

For each point, the mean of its estimation neighborhood and the leading
singular vectors of the centered neighbor matrix define a local frame. The
ratio (offset from the neighborhood center plus the tangential component)
over the tangential component bounds the local Jacobian norm from below;
that bound serves as an approximated curvature. Flat, centroid-symmetric
neighborhoods give exactly 1; bending pushes the value up.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .core import PointCloud, pairwise_euclidean
from .neighbors import knn

__all__ = [
    "LocalFrame",
    "CurvatureField",
    "CurvatureConfig",
    "estimation_neighborhood_size",
    "local_frame",
    "jacobian_lower_bound",
    "curvature_field",
    "field_to_csv",
    "field_to_json",
]

# Neighbors whose tangential component is below this fraction of the
# neighborhood radius are treated as duplicates and skipped.
DEGENERATE_REL_TOL = 1e-12


def estimation_neighborhood_size(ambient_dim: int, target_dim: int) -> int:
    """Neighborhood size used for curvature estimation: 8 when the ambient
    dimension is below the target dimension, else 4 * target_dim."""
    if ambient_dim < 1 or target_dim < 1:
        raise ValueError("dimensions must be >= 1")
    if ambient_dim < target_dim:
        return 8
    return 4 * target_dim


@dataclass(frozen=True, eq=False)
class LocalFrame:
    """Neighborhood center, orthonormal tangent basis, neighbor coordinates.

    ``basis`` is D x r with orthonormal columns (leading left singular
    vectors of the centered neighbor matrix); ``coords`` row j holds the
    r basis coordinates of neighbor j relative to the center.
    """

    center: np.ndarray
    basis: np.ndarray
    coords: np.ndarray

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def n_neighbors(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """Per-point curvature values with their global statistics.

    ``degenerate`` flags points whose neighborhood had no usable tangential
    spread; those take the sentinel value 1 (identity bound).
    """

    j_inf: np.ndarray
    mean: float
    std_dev: float
    degenerate: np.ndarray

    @property
    def n(self) -> int:
        return self.j_inf.shape[0]


@dataclass(frozen=True)
class CurvatureConfig:
    """Estimation-neighborhood size, retained rank, and target dimension.

    ``aggregation`` controls how per-neighbor bound samples combine into one
    value per point: ``"max"`` (tightest lower bound, default) or ``"mean"``
    for sensitivity studies.
    """

    estimation_size: int
    rank: int
    target_dim: int
    aggregation: str = field(default="max")

    def __post_init__(self):
        if not (self.estimation_size >= self.rank >= 1):
            raise ValueError(
                f"need estimation_size >= rank >= 1, got "
                f"({self.estimation_size}, {self.rank})"
            )
        if self.target_dim < 1:
            raise ValueError(f"target_dim must be >= 1, got {self.target_dim}")
        if self.aggregation not in ("max", "mean"):
            raise ValueError(f"unknown aggregation {self.aggregation!r}")

    @classmethod
    def for_cloud(cls, cloud: PointCloud, target_dim: int, aggregation: str = "max"):
        """Default configuration: sizing rule above, rank = target dimension."""
        size = estimation_neighborhood_size(cloud.dim, target_dim)
        size = min(size, cloud.n - 1)
        rank = min(target_dim, cloud.dim, size)
        return cls(size, rank, target_dim, aggregation)


def _fix_column_signs(basis: np.ndarray) -> np.ndarray:
    # SVD sign convention: largest-magnitude entry of each column positive.
    flips = np.sign(basis[np.argmax(np.abs(basis), axis=0), np.arange(basis.shape[1])])
    flips[flips == 0] = 1.0
    return basis * flips


def local_frame(
    cloud: PointCloud, i: int, size: int, rank: int, neighbor_idx: np.ndarray | None = None
) -> LocalFrame:
    """Local frame at point ``i`` from its ``size`` nearest neighbors.

    ``neighbor_idx`` bypasses the internal kNN query when a graph is already
    available.
    """
    if size > cloud.n - 1:
        raise ValueError(f"estimation size {size} needs at least {size + 1} points")
    if rank > min(cloud.dim, size):
        raise ValueError(f"rank {rank} exceeds min(dim={cloud.dim}, size={size})")
    if neighbor_idx is None:
        neighbor_idx, _ = knn(cloud, size).neighbors(i)
    nbrs = cloud.points[neighbor_idx]
    center = nbrs.mean(axis=0)
    centered = (nbrs - center).T  # D x N
    u_mat, _, _ = np.linalg.svd(centered, full_matrices=False)
    basis = _fix_column_signs(u_mat[:, :rank])
    coords = centered.T @ basis  # N x r
    return LocalFrame(center, basis, coords)


def jacobian_lower_bound(
    frame: LocalFrame, x_i: np.ndarray, aggregation: str = "max"
) -> tuple[float, bool]:
    """Lower bound on the local Jacobian norm at ``x_i``; returns
    ``(value, degenerate)``.

    Each neighbor j with nonzero tangential coordinates contributes
    ``(||center - x_i|| + ||basis @ coords_j||) / ||coords_j||``; samples are
    combined by max (or mean). A fully degenerate neighborhood - every
    neighbor collapsed onto the point - yields the sentinel 1.
    """
    offset = float(np.linalg.norm(frame.center - x_i))
    tangential = frame.coords @ frame.basis.T  # N x D, equals projections
    proj_norms = np.linalg.norm(tangential, axis=1)
    coord_norms = np.linalg.norm(frame.coords, axis=1)
    scale = float(coord_norms.max(initial=0.0))
    valid = coord_norms > DEGENERATE_REL_TOL * scale if scale > 0.0 else np.zeros_like(coord_norms, dtype=bool)
    if not np.any(valid):
        return 1.0, True
    samples = (offset + proj_norms[valid]) / coord_norms[valid]
    if aggregation == "mean":
        return float(samples.mean()), False
    return float(samples.max()), False


def curvature_field(cloud: PointCloud, config: CurvatureConfig) -> CurvatureField:
    """Curvature values at every point of the cloud, plus mean and std dev."""
    if config.estimation_size >= cloud.n:
        raise ValueError(
            f"estimation size {config.estimation_size} must be below n={cloud.n}"
        )
    dmat = pairwise_euclidean(cloud)
    graph = knn(cloud, config.estimation_size, dmat=dmat)
    values = np.empty(cloud.n)
    degenerate = np.zeros(cloud.n, dtype=bool)
    for i in range(cloud.n):
        idx, _ = graph.neighbors(i)
        frame = local_frame(cloud, i, config.estimation_size, config.rank, neighbor_idx=idx)
        values[i], degenerate[i] = jacobian_lower_bound(
            frame, cloud.points[i], config.aggregation
        )
    return CurvatureField(values, float(values.mean()), float(values.std()), degenerate)


def field_to_csv(curv: CurvatureField, path) -> None:
    """Two columns: point index, curvature value."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("index,j_inf\n")
        for i, v in enumerate(curv.j_inf):
            fh.write(f"{i},{format(v, '.17g')}\n")


def field_to_json(curv: CurvatureField, path=None) -> str:
    payload = {
        "j_inf": [float(v) for v in curv.j_inf],
        "mean": curv.mean,
        "std_dev": curv.std_dev,
        "degenerate_count": int(curv.degenerate.sum()),
    }
    text = json.dumps(payload, sort_keys=True)
    if path is not None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    return text
