import numpy as np
import pytest

from adaknn.core import PointCloud, generate_swiss_roll


def random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random orthogonal matrix via QR."""
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q * np.sign(np.diag(r))


def rigidly_moved(cloud: PointCloud, rng: np.random.Generator) -> PointCloud:
    rot = random_rotation(cloud.dim, rng)
    shift = rng.normal(scale=5.0, size=cloud.dim)
    return PointCloud(cloud.points @ rot.T + shift)


@pytest.fixture(scope="session")
def roll300() -> PointCloud:
    return generate_swiss_roll(300, 123)


@pytest.fixture(scope="session")
def roll800() -> PointCloud:
    return generate_swiss_roll(800, 55)
