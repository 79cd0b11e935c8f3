"""Point clouds, synthetic data, CSV round-tripping, pairwise distances.

Coordinates live in plain float64 arrays. A :class:`PointCloud` freezes its
array on construction so the same row index means the same sample everywhere
downstream, and clouds can be shared read-only across threads.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import pairwise_distances
from .errors import CsvParseError

__all__ = [
    "PointCloud",
    "DistanceMatrix",
    "generate_swiss_roll",
    "load_csv",
    "save_csv",
    "pairwise_euclidean",
]

# Swiss-roll parameterization: the rectangle (t, h) is rolled into
# (t*cos t, h, t*sin t); intrinsic dimension 2. The turn count and height are
# sized so that Euclidean input distances retain a usable correlation with
# the unrolled geometry; on longer rolls the chord metric folds so badly that
# residual variance saturates near 1 for every embedding.
ROLL_T_MIN = 1.5 * np.pi
ROLL_T_MAX = 3.15 * np.pi
ROLL_HEIGHT = 15.0

MAX_SEED = 2**64 - 1


@dataclass(frozen=True, eq=False)
class PointCloud:
    """n points in ambient dimension D, immutable after construction."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-D array, got ndim={pts.ndim}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"need at least one point and one dimension, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain NaN or infinity")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Dense symmetric n x n distance matrix with a zero diagonal.

    ``metric_tag`` is ``"euclidean"`` or ``"geodesic"``. ``kept_indices`` is
    set only when a geodesic matrix was restricted to the largest connected
    component; it maps matrix rows back to original point indices.
    """

    values: np.ndarray
    metric_tag: str = "euclidean"
    kept_indices: np.ndarray | None = field(default=None)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise ValueError(f"distance matrix must be square, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("distance matrix has non-finite entries")
        if np.any(vals < 0.0):
            raise ValueError("distance matrix has negative entries")
        if np.any(np.diagonal(vals) != 0.0):
            raise ValueError("distance matrix diagonal must be zero")
        if not np.array_equal(vals, vals.T):
            raise ValueError("distance matrix must be symmetric")
        if self.metric_tag not in ("euclidean", "geodesic"):
            raise ValueError(f"unknown metric_tag {self.metric_tag!r}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def generate_swiss_roll(n: int, seed: int) -> PointCloud:
    """Sample ``n`` points uniformly on the Swiss roll surface in R^3.

    The same seed reproduces the cloud bit for bit; seeds must fit in an
    unsigned 64-bit integer.
    """
    if n < 1:
        raise ValueError(f"need n >= 1 points, got {n}")
    if not (0 <= seed <= MAX_SEED):
        raise ValueError(f"seed must fit in uint64, got {seed}")
    rng = np.random.default_rng(seed)
    t = rng.uniform(ROLL_T_MIN, ROLL_T_MAX, size=n)
    h = rng.uniform(0.0, ROLL_HEIGHT, size=n)
    pts = np.column_stack((t * np.cos(t), h, t * np.sin(t)))
    return PointCloud(pts)


def save_csv(cloud: PointCloud, path) -> None:
    """Write one point per row, comma separated, LF endings, no header.

    Floats are printed with 17 significant digits so a reload reproduces the
    coordinates exactly.
    """
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in cloud.points:
            fh.write(",".join(format(v, ".17g") for v in row))
            fh.write("\n")


def load_csv(path) -> PointCloud:
    """Parse a headerless numeric CSV into a :class:`PointCloud`."""
    rows: list[list[float]] = []
    width = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                raise CsvParseError("empty row", line=lineno)
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise CsvParseError(
                    f"expected {width} fields, found {len(fields)}", line=lineno
                )
            try:
                rows.append([float(f) for f in fields])
            except ValueError as exc:
                raise CsvParseError(f"non-numeric field: {exc}", line=lineno) from None
    if not rows:
        raise CsvParseError("file contains no data rows")
    return PointCloud(np.asarray(rows))


def pairwise_euclidean(cloud: PointCloud) -> DistanceMatrix:
    """Dense Euclidean distance matrix between all point pairs."""
    return DistanceMatrix(pairwise_distances(cloud.points), metric_tag="euclidean")
