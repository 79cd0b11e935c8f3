"""Hot numeric kernels: pairwise distances and all-pairs shortest paths.

Each kernel ships in two interchangeable versions: a loop implementation
compiled with numba (``*_loops``) and a vectorized pure-numpy one
(``*_numpy``). The public dispatchers pick the compiled path unless numba is
unavailable or disabled via ``ADAKNN_DISABLE_NUMBA`` (see :mod:`adaknn._jit`).
Both paths produce identical results; ``benchmarks/bench_kernels.py`` compares
their speed.
"""

import math

import numpy as np

from ._jit import NUMBA_ENABLED, njit, prange

__all__ = [
    "pairwise_distances",
    "dijkstra_all_pairs",
    "pairwise_distances_loops",
    "pairwise_distances_numpy",
    "dijkstra_all_pairs_loops",
    "dijkstra_all_pairs_numpy",
]


@njit(cache=True)
def pairwise_distances_loops(points):
    """Direct O(n^2 D) Euclidean distance matrix."""
    n, dim = points.shape
    out = np.zeros((n, n), np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(dim):
                diff = points[i, k] - points[j, k]
                acc += diff * diff
            d = math.sqrt(acc)
            out[i, j] = d
            out[j, i] = d
    return out


def pairwise_distances_numpy(points):
    """Broadcasted Euclidean distance matrix, symmetrized exactly."""
    diff = points[:, None, :] - points[None, :, :]
    out = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(out, 0.0)
    return out


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    if NUMBA_ENABLED:
        return pairwise_distances_loops(points)
    return pairwise_distances_numpy(points)


@njit(cache=True)
def _dijkstra_row(indptr, indices, weights, src, dist, visited, heap_d, heap_v):
    # Binary min-heap with lazy deletion; heap arrays sized for one push per
    # directed edge plus the source.
    n = dist.shape[0]
    for i in range(n):
        dist[i] = np.inf
        visited[i] = False
    dist[src] = 0.0
    heap_d[0] = 0.0
    heap_v[0] = src
    size = 1
    while size > 0:
        d = heap_d[0]
        u = heap_v[0]
        size -= 1
        heap_d[0] = heap_d[size]
        heap_v[0] = heap_v[size]
        pos = 0
        while True:
            left = 2 * pos + 1
            right = left + 1
            smallest = pos
            if left < size and heap_d[left] < heap_d[smallest]:
                smallest = left
            if right < size and heap_d[right] < heap_d[smallest]:
                smallest = right
            if smallest == pos:
                break
            heap_d[pos], heap_d[smallest] = heap_d[smallest], heap_d[pos]
            heap_v[pos], heap_v[smallest] = heap_v[smallest], heap_v[pos]
            pos = smallest
        if visited[u] or d > dist[u]:
            continue
        visited[u] = True
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            nd = d + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                heap_d[size] = nd
                heap_v[size] = v
                pos = size
                size += 1
                while pos > 0:
                    parent = (pos - 1) // 2
                    if heap_d[pos] < heap_d[parent]:
                        heap_d[pos], heap_d[parent] = heap_d[parent], heap_d[pos]
                        heap_v[pos], heap_v[parent] = heap_v[parent], heap_v[pos]
                        pos = parent
                    else:
                        break


@njit(cache=True, parallel=True)
def dijkstra_all_pairs_loops(indptr, indices, weights, n):
    """Heap-based Dijkstra from every source over a CSR adjacency."""
    m = indices.shape[0]
    out = np.empty((n, n), np.float64)
    for src in prange(n):
        dist = np.empty(n, np.float64)
        visited = np.empty(n, np.bool_)
        heap_d = np.empty(m + 1, np.float64)
        heap_v = np.empty(m + 1, np.int64)
        _dijkstra_row(indptr, indices, weights, src, dist, visited, heap_d, heap_v)
        out[src] = dist
    return out


def dijkstra_all_pairs_numpy(indptr, indices, weights, n):
    """Selection-based Dijkstra (O(n^2) per source) on the same CSR input."""
    out = np.empty((n, n), np.float64)
    for src in range(n):
        dist = np.full(n, np.inf)
        dist[src] = 0.0
        done = np.zeros(n, dtype=bool)
        for _ in range(n):
            masked = np.where(done, np.inf, dist)
            u = int(np.argmin(masked))
            if not np.isfinite(masked[u]):
                break
            done[u] = True
            lo, hi = indptr[u], indptr[u + 1]
            nbrs = indices[lo:hi]
            cand = dist[u] + weights[lo:hi]
            better = cand < dist[nbrs]
            dist[nbrs[better]] = cand[better]
        out[src] = dist
    return out


def dijkstra_all_pairs(
    indptr: np.ndarray, indices: np.ndarray, weights: np.ndarray, n: int
) -> np.ndarray:
    if NUMBA_ENABLED:
        return dijkstra_all_pairs_loops(indptr, indices, weights, n)
    return dijkstra_all_pairs_numpy(indptr, indices, weights, n)
