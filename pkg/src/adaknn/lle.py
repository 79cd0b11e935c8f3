"""Locally linear embedding with fixed or per-point neighbor counts.

Each point is written as an affine combination of its neighbors (weights sum
to one); the embedding is read off the smallest nontrivial eigenvectors of
(I - W)^T (I - W).
"""

from dataclasses import dataclass

import numpy as np

from .core import PointCloud
from .errors import NumericalError
from .neighbors import NeighborGraph

__all__ = ["WeightMatrix", "Embedding", "reconstruction_weights", "lle_embed", "save_embedding_csv"]

DEFAULT_REG = 1e-3

# Tolerance for the structural zero eigenvalue of the alignment matrix,
# relative to its largest eigenvalue.
_NULL_EIG_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Dense n x n barycentric weight matrix; row i is supported on the
    neighbors of point i and sums to one."""

    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True, eq=False)
class Embedding:
    """n x d embedded coordinates plus provenance tags.

    ``algorithm_tag`` is ``"lle"`` or ``"isomap"``; ``k_policy_tag`` records
    the neighbor policy (such as ``"fixed(8)"`` or ``"adaptive"``). ``notes``
    collects non-fatal numerical warnings raised while embedding.
    """

    coords: np.ndarray
    algorithm_tag: str
    k_policy_tag: str
    notes: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


def _solve_row(gram: np.ndarray, k: int) -> np.ndarray:
    # Constrained minimum of w^T G w subject to sum(w) = 1 via the bordered
    # system [[G, 1], [1^T, 0]]; reduces to the classic G^-1 1 / (1^T G^-1 1)
    # when G is nonsingular and stays well defined when it is not.
    bordered = np.zeros((k + 1, k + 1))
    bordered[:k, :k] = gram
    bordered[:k, k] = 1.0
    bordered[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        w = np.linalg.solve(bordered, rhs)[:k]
    except np.linalg.LinAlgError:
        w = np.linalg.lstsq(bordered, rhs, rcond=None)[0][:k]
    total = w.sum()
    if not np.isfinite(total) or abs(total) < 1e-12:
        return np.full(k, 1.0 / k)
    return w / total


def reconstruction_weights(
    cloud: PointCloud, graph: NeighborGraph, reg: float = DEFAULT_REG
) -> WeightMatrix:
    """Barycentric weights minimizing each point's reconstruction error.

    The local Gram system gets a Tikhonov term ``reg * trace(G) * I`` whenever
    the row has more neighbors than ambient dimensions or the Gram matrix is
    rank deficient; a zero-trace (fully collapsed) neighborhood falls back to
    uniform weights.
    """
    if reg < 0:
        raise ValueError(f"regularization must be >= 0, got {reg}")
    if graph.n != cloud.n:
        raise ValueError("graph and cloud cover different point counts")
    n = cloud.n
    weights = np.zeros((n, n))
    for i in range(n):
        idx, _ = graph.neighbors(i)
        k = idx.shape[0]
        local = cloud.points[idx] - cloud.points[i]
        gram = local @ local.T
        trace = np.trace(gram)
        if trace <= 0.0:
            weights[i, idx] = 1.0 / k
            continue
        if reg > 0.0 and (k > cloud.dim or np.linalg.matrix_rank(gram) < k):
            gram = gram + reg * trace * np.eye(k)
        weights[i, idx] = _solve_row(gram, k)
    return WeightMatrix(weights)


def lle_embed(weights: WeightMatrix, target_dim: int, k_policy_tag: str = "fixed") -> Embedding:
    """Embedding from the eigenvectors of M = (I - W)^T (I - W) for the
    smallest nonzero eigenvalues, scaled by sqrt(n), columns zero-centered
    and signs fixed deterministically."""
    n = weights.n
    if not (1 <= target_dim < n):
        raise ValueError(f"target_dim must be in [1, {n - 1}], got {target_dim}")
    residual_op = np.eye(n) - weights.weights
    m_mat = residual_op.T @ residual_op
    eigvals, eigvecs = np.linalg.eigh(m_mat)
    # Row sums of W are 1, so the constant vector is in the null space; the
    # bottom eigenvalue must vanish before we discard it.
    scale = max(abs(eigvals[-1]), 1.0)
    if abs(eigvals[0]) > _NULL_EIG_RTOL * scale:
        raise NumericalError(
            f"alignment matrix lacks its structural zero eigenvalue "
            f"(smallest = {eigvals[0]:.3e}); weight rows may not sum to one"
        )
    coords = eigvecs[:, 1 : target_dim + 1] * np.sqrt(n)
    flips = np.sign(coords[np.argmax(np.abs(coords), axis=0), np.arange(target_dim)])
    flips[flips == 0] = 1.0
    coords = coords * flips
    coords = coords - coords.mean(axis=0)
    return Embedding(coords, "lle", k_policy_tag)


def save_embedding_csv(embedding: Embedding, path) -> None:
    """One row per point, one column per embedded dimension, no header."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in embedding.coords:
            fh.write(",".join(format(v, ".17g") for v in row))
            fh.write("\n")
