"""Curvature-driven neighbor counts.

A point whose curvature sits above the baseline gets fewer neighbors than the
starting count, a flatter-than-average point gets more, and everything is
clamped into [k_min, k_max]. The step size delta_0 converts curvature change
into whole neighbors; it defaults to the interquartile range of the curvature
values, a spread measure that stays scale free without being inflated by the
field's heavy upper tail (near-duplicate neighbors produce huge outliers, and
a tail-inflated step would leave every typical point unadjusted).
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .curvature import CurvatureField
from .neighbors import NeighborGraph

__all__ = [
    "AdaptiveKConfig",
    "KAssignment",
    "default_bounds",
    "adaptive_k",
    "group_partition",
    "grouped_adaptive_k",
    "assignment_to_csv",
]

DEFAULT_K_INIT = 8


def default_bounds(ambient_dim: int, target_dim: int, n: int) -> tuple[int, int]:
    """Neighbor-count bounds: (target_dim + 1, min(6 * ambient_dim, n - 1))."""
    if ambient_dim < 1 or target_dim < 1:
        raise ValueError("dimensions must be >= 1")
    if n <= target_dim + 1:
        raise ValueError(
            f"need more than {target_dim + 1} points for target dimension "
            f"{target_dim}, got n={n}"
        )
    return target_dim + 1, min(6 * ambient_dim, n - 1)


@dataclass(frozen=True)
class AdaptiveKConfig:
    """Parameters of the adaptive rule.

    ``delta_0 = None`` means "use the interquartile range of the curvature
    values" (falling back to the standard deviation, then to 1, when zero).
    ``baseline`` picks the reference the per-point curvature is compared to:
    the global field mean (default) or the mean over each point's own
    neighborhood (``"local"``, requires a neighbor graph). ``groups`` > 1
    switches to one shared k per curvature group; ``partition`` chooses how
    groups are formed (by curvature quantiles or by index blocks).
    """

    k_min: int
    k_max: int
    k_init: int = DEFAULT_K_INIT
    delta_0: float | None = None
    groups: int = 1
    baseline: str = field(default="global")
    partition: str = field(default="quantile")

    def __post_init__(self):
        if self.k_min > self.k_max:
            raise ValueError(f"k_min {self.k_min} exceeds k_max {self.k_max}")
        if not (self.k_min <= self.k_init <= self.k_max):
            raise ValueError(
                f"k_init {self.k_init} outside [{self.k_min}, {self.k_max}]"
            )
        if self.delta_0 is not None and not (self.delta_0 > 0):
            raise ValueError(f"delta_0 must be positive, got {self.delta_0}")
        if self.groups < 1:
            raise ValueError(f"groups must be >= 1, got {self.groups}")
        if self.baseline not in ("global", "local"):
            raise ValueError(f"unknown baseline {self.baseline!r}")
        if self.partition not in ("quantile", "index"):
            raise ValueError(f"unknown partition {self.partition!r}")

    @classmethod
    def for_dims(cls, ambient_dim: int, target_dim: int, n: int, **overrides):
        k_min, k_max = default_bounds(ambient_dim, target_dim, n)
        base = cls(k_min=k_min, k_max=k_max, k_init=min(DEFAULT_K_INIT, k_max))
        return replace(base, **overrides) if overrides else base


@dataclass(frozen=True, eq=False)
class KAssignment:
    """Per-point neighbor counts produced by the adaptive rule."""

    k_values: np.ndarray
    config: AdaptiveKConfig

    @property
    def n(self) -> int:
        return self.k_values.shape[0]


def _resolve_delta(config: AdaptiveKConfig, curv: CurvatureField) -> float:
    if config.delta_0 is not None:
        return config.delta_0
    q75, q25 = np.percentile(curv.j_inf, 75), np.percentile(curv.j_inf, 25)
    if q75 > q25:
        return float(q75 - q25)
    # Uniform field: any positive step works since every curvature delta is 0.
    return curv.std_dev if curv.std_dev > 0.0 else 1.0


def _apply_rule(delta_j: np.ndarray, config: AdaptiveKConfig, delta_0: float, n: int) -> np.ndarray:
    raw = config.k_init + np.trunc(delta_j / delta_0).astype(np.int64)
    hi = min(config.k_max, n - 1)
    if config.k_min > hi:
        raise ValueError(
            f"k_min {config.k_min} exceeds the feasible maximum {hi} for n={n}"
        )
    return np.clip(raw, config.k_min, hi)


def adaptive_k(
    curv: CurvatureField,
    config: AdaptiveKConfig,
    graph: NeighborGraph | None = None,
) -> KAssignment:
    """Per-point counts: k_init plus the truncated curvature deficit in units
    of delta_0, clamped to the configured bounds and to n - 1."""
    delta_0 = _resolve_delta(config, curv)
    if config.baseline == "local":
        if graph is None:
            raise ValueError("baseline='local' needs the neighbor graph used for curvature")
        if graph.n != curv.n:
            raise ValueError("graph and curvature field cover different point counts")
        local_mean = np.array(
            [curv.j_inf[graph.neighbors(i)[0]].mean() for i in range(curv.n)]
        )
        delta_j = local_mean - curv.j_inf
    else:
        delta_j = curv.mean - curv.j_inf
    return KAssignment(_apply_rule(delta_j, config, delta_0, curv.n), config)


def group_partition(curv: CurvatureField, groups: int, partition: str = "quantile") -> np.ndarray:
    """Split points into ``groups`` near-equal contiguous groups.

    ``"quantile"`` orders points by curvature first, so group g spans the
    g-th curvature quantile; ``"index"`` splits the raw index range. Label
    arrays map each point to its group, 0-based.
    """
    n = curv.n
    if not (1 <= groups <= n):
        raise ValueError(f"groups must be in [1, {n}], got {groups}")
    if partition == "quantile":
        order = np.argsort(curv.j_inf, kind="stable")
    elif partition == "index":
        order = np.arange(n)
    else:
        raise ValueError(f"unknown partition {partition!r}")
    labels = np.empty(n, dtype=np.int64)
    for g, chunk in enumerate(np.array_split(order, groups)):
        labels[chunk] = g
    return labels


def grouped_adaptive_k(
    curv: CurvatureField,
    config: AdaptiveKConfig,
) -> KAssignment:
    """One shared k per curvature group.

    Each group's curvature deficit is the global mean minus the group mean,
    so a single group reproduces the starting count exactly and n singleton
    groups reduce to the per-point rule.
    """
    delta_0 = _resolve_delta(config, curv)
    labels = group_partition(curv, config.groups, config.partition)
    group_means = np.array(
        [curv.j_inf[labels == g].mean() for g in range(config.groups)]
    )
    delta_groups = curv.mean - group_means
    k_groups = _apply_rule(delta_groups, config, delta_0, curv.n)
    return KAssignment(k_groups[labels], config)


def assignment_to_csv(assignment: KAssignment, path) -> None:
    """Two columns: point index, neighbor count."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("index,k\n")
        for i, k in enumerate(assignment.k_values):
            fh.write(f"{i},{int(k)}\n")
