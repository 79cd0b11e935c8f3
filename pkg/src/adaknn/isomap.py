"""Isometric mapping: graph geodesics plus classical multidimensional scaling.

Geodesic distances are all-pairs shortest paths over the symmetrized neighbor
graph (heap Dijkstra per source, numba-compiled when available). Classical
MDS double-centers the squared distances and reads coordinates off the top
eigenpairs.
"""

import logging

import numpy as np

from ._kernels import dijkstra_all_pairs
from .core import DistanceMatrix, PointCloud
from .errors import DisconnectedGraphError
from .lle import Embedding
from .neighbors import NeighborGraph, connected_components, symmetrize

logger = logging.getLogger(__name__)

__all__ = ["geodesic_distances", "classical_mds", "isomap_embed"]


def geodesic_distances(
    cloud: PointCloud, graph: NeighborGraph, restrict_to_largest: bool = False
) -> DistanceMatrix:
    """Shortest-path distance matrix over the symmetrized neighbor graph.

    A disconnected graph raises :class:`DisconnectedGraphError` unless
    ``restrict_to_largest`` is set, in which case the matrix covers only the
    largest component and ``kept_indices`` maps its rows back to original
    point indices.
    """
    if graph.n != cloud.n:
        raise ValueError("graph and cloud cover different point counts")
    undirected = symmetrize(graph)
    labels = connected_components(undirected)
    n_components = int(labels.max()) + 1
    kept = None
    if n_components > 1:
        if not restrict_to_largest:
            raise DisconnectedGraphError(n_components)
        sizes = np.bincount(labels)
        keep_label = int(np.argmax(sizes))  # ties go to the lowest label
        kept = np.nonzero(labels == keep_label)[0]
        renumber = -np.ones(cloud.n, dtype=np.int64)
        renumber[kept] = np.arange(kept.shape[0])
        mask = labels[undirected.u] == keep_label
        undirected = type(undirected)(
            kept.shape[0],
            renumber[undirected.u[mask]],
            renumber[undirected.v[mask]],
            undirected.w[mask],
        )
    indptr, indices, weights = undirected.to_csr()
    dist = dijkstra_all_pairs(indptr, indices, weights, undirected.n)
    # Path sums i->j and j->i can differ in the last ulp; make symmetry exact.
    dist = (dist + dist.T) / 2.0
    np.fill_diagonal(dist, 0.0)
    return DistanceMatrix(dist, metric_tag="geodesic", kept_indices=kept)


def classical_mds(distances: DistanceMatrix, target_dim: int) -> Embedding:
    """Coordinates whose Euclidean distances best match ``distances``.

    The Gram matrix is -1/2 J D^2 J with J the centering projector; the top
    ``target_dim`` eigenpairs give coordinates scaled by the square roots of
    their eigenvalues. Negative eigenvalues inside the top block (the matrix
    was not exactly Euclidean) are clamped to zero, zero-filling those
    dimensions, and noted on the returned embedding.
    """
    n = distances.n
    if not (1 <= target_dim < n):
        raise ValueError(f"target_dim must be in [1, {n - 1}], got {target_dim}")
    sq = distances.values**2
    row_mean = sq.mean(axis=1, keepdims=True)
    gram = -0.5 * (sq - row_mean - row_mean.T + sq.mean())
    gram = (gram + gram.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(gram)
    top = np.argsort(eigvals)[::-1][:target_dim]
    lam = eigvals[top]
    vecs = eigvecs[:, top]
    notes = ()
    # Eigenvalues at numerical zero (or negative: non-Euclidean input) carry
    # no usable coordinate; their dimensions are zero-filled.
    tol = float(np.abs(eigvals).max()) * 1e-12
    bad = lam <= tol
    if np.any(bad):
        n_bad = int(bad.sum())
        msg = (
            f"only {target_dim - n_bad} of {target_dim} requested dimensions have "
            "positive eigenvalues; remaining coordinates are zero"
        )
        logger.warning(msg)
        notes = (msg,)
        lam = np.where(bad, 0.0, lam)
    coords = vecs * np.sqrt(lam)
    flips = np.sign(coords[np.argmax(np.abs(coords), axis=0), np.arange(target_dim)])
    flips[flips == 0] = 1.0
    coords = coords * flips
    coords = coords - coords.mean(axis=0)
    return Embedding(coords, "isomap", "precomputed", notes=notes)


def isomap_embed(
    cloud: PointCloud,
    graph: NeighborGraph,
    target_dim: int,
    k_policy_tag: str = "fixed",
    restrict_to_largest: bool = False,
) -> Embedding:
    """Geodesic distances followed by classical MDS."""
    geo = geodesic_distances(cloud, graph, restrict_to_largest=restrict_to_largest)
    embedding = classical_mds(geo, target_dim)
    notes = embedding.notes
    if geo.kept_indices is not None:
        notes = notes + (
            f"embedded largest component only: {geo.kept_indices.shape[0]} of {cloud.n} points",
        )
    return Embedding(embedding.coords, "isomap", k_policy_tag, notes=notes)
