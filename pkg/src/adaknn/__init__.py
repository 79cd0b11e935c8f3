"""Manifold embedding with curvature-adaptive neighborhood sizes.

Embeds point clouds into low-dimensional space with LLE or Isomap, choosing
each point's neighbor count from a local curvature estimate, and scores
embeddings by residual variance.
"""

from ._jit import NUMBA_ENABLED
from .adaptive import (
    AdaptiveKConfig,
    KAssignment,
    adaptive_k,
    default_bounds,
    group_partition,
    grouped_adaptive_k,
)
from .core import (
    DistanceMatrix,
    PointCloud,
    generate_swiss_roll,
    load_csv,
    pairwise_euclidean,
    save_csv,
)
from .curvature import (
    CurvatureConfig,
    CurvatureField,
    LocalFrame,
    curvature_field,
    estimation_neighborhood_size,
    jacobian_lower_bound,
    local_frame,
)
from .errors import CsvParseError, DisconnectedGraphError, NumericalError
from .evaluation import (
    ResidualVarianceReport,
    SweepReport,
    embedding_residual_variance,
    relative_improvement,
    residual_variance,
    sweep_groups,
    sweep_k,
)
from .isomap import classical_mds, geodesic_distances, isomap_embed
from .lle import Embedding, WeightMatrix, lle_embed, reconstruction_weights
from .neighbors import NeighborGraph, connected_components, knn, symmetrize
from .pipeline import PipelineReport, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED",
    "AdaptiveKConfig",
    "KAssignment",
    "adaptive_k",
    "default_bounds",
    "group_partition",
    "grouped_adaptive_k",
    "DistanceMatrix",
    "PointCloud",
    "generate_swiss_roll",
    "load_csv",
    "pairwise_euclidean",
    "save_csv",
    "CurvatureConfig",
    "CurvatureField",
    "LocalFrame",
    "curvature_field",
    "estimation_neighborhood_size",
    "jacobian_lower_bound",
    "local_frame",
    "CsvParseError",
    "DisconnectedGraphError",
    "NumericalError",
    "ResidualVarianceReport",
    "SweepReport",
    "embedding_residual_variance",
    "relative_improvement",
    "residual_variance",
    "sweep_groups",
    "sweep_k",
    "classical_mds",
    "geodesic_distances",
    "isomap_embed",
    "Embedding",
    "WeightMatrix",
    "lle_embed",
    "reconstruction_weights",
    "NeighborGraph",
    "connected_components",
    "knn",
    "symmetrize",
    "PipelineReport",
    "run_pipeline",
]
