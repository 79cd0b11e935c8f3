"""Exact k-nearest-neighbor graphs with fixed or per-point neighbor counts.

Queries are brute force over the dense distance matrix. Ties in distance are
broken by ascending point index, so graphs are deterministic across runs and
thread counts.
"""

import json
from dataclasses import dataclass

import numpy as np

from .core import DistanceMatrix, PointCloud, pairwise_euclidean

__all__ = [
    "NeighborGraph",
    "UndirectedGraph",
    "knn",
    "symmetrize",
    "connected_components",
    "graph_to_json",
]


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Per-point ordered neighbor lists stored as padded arrays.

    Row i of ``indices``/``distances`` holds the ``k_per_point[i]`` nearest
    neighbors of point i, sorted ascending by distance (ties by index).
    Padding entries are -1 / +inf. ``k_policy`` is ``"fixed"`` when every
    point shares one k, ``"per_point"`` otherwise.
    """

    indices: np.ndarray
    distances: np.ndarray
    k_per_point: np.ndarray
    k_policy: str

    @property
    def n(self) -> int:
        return self.indices.shape[0]

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices and distances of point ``i`` (unpadded views)."""
        k = self.k_per_point[i]
        return self.indices[i, :k], self.distances[i, :k]


@dataclass(frozen=True, eq=False)
class UndirectedGraph:
    """Symmetrized edge set {i, j} with Euclidean weights, i < j, lexsorted."""

    n: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @property
    def n_edges(self) -> int:
        return self.u.shape[0]

    def to_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Adjacency of the undirected graph as CSR arrays (both directions)."""
        src = np.concatenate((self.u, self.v))
        dst = np.concatenate((self.v, self.u))
        wts = np.concatenate((self.w, self.w))
        order = np.lexsort((dst, src))
        src, dst, wts = src[order], dst[order], wts[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, dst.astype(np.int64), wts.astype(np.float64)


def _resolve_k(k, n: int) -> tuple[np.ndarray, str]:
    k_values = getattr(k, "k_values", k)
    if np.isscalar(k_values):
        arr = np.full(n, int(k_values), dtype=np.int64)
        policy = "fixed"
    else:
        arr = np.asarray(k_values, dtype=np.int64)
        if arr.shape != (n,):
            raise ValueError(f"per-point k must have shape ({n},), got {arr.shape}")
        policy = "per_point"
    for i in np.nonzero((arr < 1) | (arr >= n))[0]:
        raise ValueError(f"k for point {i} must be in [1, {n - 1}], got {arr[i]}")
    return arr, policy


def knn(cloud: PointCloud, k, dmat: DistanceMatrix | None = None) -> NeighborGraph:
    """Exact nearest-neighbor lists for every point.

    ``k`` may be a single int, a length-n array of per-point counts, or a
    :class:`~adaknn.adaptive.KAssignment`. ``dmat`` supplies a precomputed
    Euclidean distance matrix to avoid recomputation across repeated builds.
    """
    n = cloud.n
    k_arr, policy = _resolve_k(k, n)
    if dmat is None:
        dmat = pairwise_euclidean(cloud)
    elif dmat.n != n:
        raise ValueError(f"distance matrix is {dmat.n}x{dmat.n}, cloud has {n} points")
    values = dmat.values
    k_max = int(k_arr.max())
    indices = np.full((n, k_max), -1, dtype=np.int64)
    distances = np.full((n, k_max), np.inf)
    # Stable argsort keeps equal distances in ascending index order.
    order = np.argsort(values, axis=1, kind="stable")
    for i in range(n):
        row = order[i]
        row = row[row != i]
        ki = k_arr[i]
        indices[i, :ki] = row[:ki]
        distances[i, :ki] = values[i, row[:ki]]
    return NeighborGraph(indices, distances, k_arr, policy)


def symmetrize(graph: NeighborGraph) -> UndirectedGraph:
    """Union of directed neighbor edges as an undirected weighted edge set."""
    n = graph.n
    rows = np.repeat(np.arange(n, dtype=np.int64), graph.k_per_point)
    mask = graph.indices >= 0
    cols = graph.indices[mask]
    wts = graph.distances[mask]
    u = np.minimum(rows, cols)
    v = np.maximum(rows, cols)
    order = np.lexsort((v, u))
    u, v, wts = u[order], v[order], wts[order]
    keep = np.ones(u.shape[0], dtype=bool)
    keep[1:] = (u[1:] != u[:-1]) | (v[1:] != v[:-1])
    return UndirectedGraph(n, u[keep], v[keep], wts[keep])


def connected_components(graph: UndirectedGraph) -> np.ndarray:
    """Component label per point; labels count up from 0 in first-seen order."""
    parent = np.arange(graph.n, dtype=np.int64)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in zip(graph.u, graph.v):
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    labels = np.empty(graph.n, dtype=np.int64)
    next_label = 0
    seen: dict[int, int] = {}
    for i in range(graph.n):
        root = find(i)
        if root not in seen:
            seen[root] = next_label
            next_label += 1
        labels[i] = seen[root]
    return labels


def graph_to_json(graph: NeighborGraph, path=None) -> str:
    """Serialize neighbor lists as an array of arrays of {index, distance}."""
    payload = [
        [
            {"index": int(j), "distance": float(d)}
            for j, d in zip(*graph.neighbors(i))
        ]
        for i in range(graph.n)
    ]
    text = json.dumps(payload)
    if path is not None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    return text
