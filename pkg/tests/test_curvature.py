import numpy as np
import pytest
import scipy.linalg

from adaknn.core import PointCloud
from adaknn.curvature import (
    CurvatureConfig,
    LocalFrame,
    curvature_field,
    estimation_neighborhood_size,
    field_to_csv,
    jacobian_lower_bound,
    local_frame,
)

from conftest import rigidly_moved


def oracle_curvature(points, i, size, rank):
    """Recompute the bound from scratch: own neighbor scan, scipy SVD,
    literal per-neighbor ratio, max aggregation."""
    x_i = points[i]
    order = sorted(
        (float(np.linalg.norm(points[j] - x_i)), j) for j in range(len(points)) if j != i
    )
    nbrs = points[[j for _, j in order[:size]]]
    center = nbrs.mean(axis=0)
    centered = (nbrs - center).T
    u_mat, svals, _ = scipy.linalg.svd(centered, full_matrices=False)
    q_mat = u_mat[:, :rank]
    offset = np.linalg.norm(center - x_i)
    best = None
    scale = max(np.linalg.norm(q_mat.T @ (v - center)) for v in nbrs)
    for v in nbrs:
        theta = q_mat.T @ (v - center)
        norm = np.linalg.norm(theta)
        if norm <= 1e-12 * scale:
            continue
        q = (offset + np.linalg.norm(q_mat @ theta)) / norm
        best = q if best is None else max(best, q)
    return 1.0 if best is None else best


class TestEstimationSize:
    @pytest.mark.parametrize(
        "ambient,target,expected",
        [(3, 2, 8), (1, 2, 8), (10, 3, 12), (2, 2, 8), (5, 1, 4)],
    )
    def test_sizing_rule(self, ambient, target, expected):
        assert estimation_neighborhood_size(ambient, target) == expected

    def test_rejects_bad_dims(self):
        with pytest.raises(ValueError):
            estimation_neighborhood_size(0, 2)


class TestLocalFrame:
    def test_zero_spread_neighborhood(self):
        p = np.array([2.0, -1.0, 3.0])
        pts = np.vstack(([0.0, 0.0, 0.0], np.tile(p, (5, 1))))
        frame = local_frame(PointCloud(pts), 0, 5, 2)
        np.testing.assert_allclose(frame.center, p, atol=1e-15)
        np.testing.assert_allclose(frame.coords, 0.0, atol=1e-15)

    def test_planar_neighborhood_exact_reconstruction(self):
        rng = np.random.default_rng(8)
        plane = rng.normal(size=(12, 2)) @ np.array([[1.0, 0.0, 0.5], [0.0, 1.0, -0.25]])
        pts = np.vstack((np.zeros(3), plane + np.array([0.3, 0.4, 0.5])))
        frame = local_frame(PointCloud(pts), 0, 12, 2, neighbor_idx=np.arange(1, 13))
        centered = pts[1:] - frame.center
        recon = frame.coords @ frame.basis.T
        np.testing.assert_allclose(recon, centered, atol=1e-9)

    def test_basis_orthonormal(self, roll300):
        frame = local_frame(roll300, 10, 8, 2)
        np.testing.assert_allclose(frame.basis.T @ frame.basis, np.eye(2), atol=1e-10)

    def test_matches_dense_svd_oracle(self):
        rng = np.random.default_rng(15)
        pts = rng.normal(size=(30, 3))
        frame = local_frame(PointCloud(pts), 0, 10, 2)
        order = sorted(
            (float(np.linalg.norm(pts[j] - pts[0])), j) for j in range(1, 30)
        )
        nbrs = pts[[j for _, j in order[:10]]]
        centered = (nbrs - nbrs.mean(axis=0)).T
        u_mat, _, _ = scipy.linalg.svd(centered, full_matrices=False)
        for col in range(2):
            dot = abs(frame.basis[:, col] @ u_mat[:, col])
            assert dot == pytest.approx(1.0, abs=1e-9)


class TestJacobianLowerBound:
    def test_centroid_symmetric_gives_one(self):
        # neighbors arranged symmetrically about the query point
        pts = np.array(
            [[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
        )
        frame = local_frame(PointCloud(pts), 0, 4, 2)
        value, degenerate = jacobian_lower_bound(frame, pts[0])
        assert not degenerate
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_analytic_offset_case(self):
        # unit offset from the center, smallest tangential norm 0.5 -> 3.0
        basis = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        coords = np.array([[0.5, 0.0], [0.0, 1.0], [-2.0, 0.0]])
        center = np.array([0.0, 0.0, 1.0])
        frame = LocalFrame(center, basis, coords)
        value, degenerate = jacobian_lower_bound(frame, np.zeros(3))
        assert not degenerate
        assert value == pytest.approx(3.0, abs=1e-12)

    def test_fully_degenerate_sentinel(self):
        frame = LocalFrame(np.zeros(3), np.eye(3)[:, :2], np.zeros((4, 2)))
        value, degenerate = jacobian_lower_bound(frame, np.ones(3))
        assert degenerate
        assert value == 1.0

    def test_mean_aggregation(self):
        basis = np.eye(3)[:, :2]
        coords = np.array([[1.0, 0.0], [0.0, 2.0]])
        frame = LocalFrame(np.array([0.0, 0.0, 1.0]), basis, coords)
        value, _ = jacobian_lower_bound(frame, np.zeros(3), aggregation="mean")
        assert value == pytest.approx(((1 + 1) / 1 + (1 + 2) / 2) / 2, abs=1e-12)

    def test_matches_from_scratch_oracle(self, roll300):
        rng = np.random.default_rng(2)
        graph_size, rank = 8, 2
        for i in rng.integers(0, roll300.n, size=12):
            frame = local_frame(roll300, int(i), graph_size, rank)
            got, _ = jacobian_lower_bound(frame, roll300.points[i])
            want = oracle_curvature(roll300.points, int(i), graph_size, rank)
            assert got == pytest.approx(want, rel=1e-8)

    def test_projection_norm_consistency(self, roll300):
        # ||basis @ coords_j|| equals ||coords_j|| by orthonormality, so each
        # sample equals 1 + offset / ||coords_j||.
        frame = local_frame(roll300, 33, 8, 2)
        offset = np.linalg.norm(frame.center - roll300.points[33])
        norms = np.linalg.norm(frame.coords, axis=1)
        proj = np.linalg.norm(frame.coords @ frame.basis.T, axis=1)
        np.testing.assert_allclose(proj, norms, atol=1e-10)
        got, _ = jacobian_lower_bound(frame, roll300.points[33])
        assert got == pytest.approx(1.0 + offset / norms[norms > 0].min(), rel=1e-10)


class TestCurvatureField:
    def test_planar_grid_interior_is_flat(self):
        xs, ys = np.meshgrid(np.arange(12.0), np.arange(12.0))
        pts = np.column_stack((xs.ravel(), ys.ravel(), np.zeros(xs.size)))
        cloud = PointCloud(pts)
        field = curvature_field(cloud, CurvatureConfig(8, 2, 2))
        interior = [
            i
            for i, (x, y) in enumerate(zip(xs.ravel(), ys.ravel()))
            if 1 <= x <= 10 and 1 <= y <= 10
        ]
        np.testing.assert_allclose(field.j_inf[interior], 1.0, atol=1e-9)
        assert field.std_dev < field.mean
        assert not field.degenerate.any()

    def test_rigid_motion_invariance(self, roll300):
        rng = np.random.default_rng(31)
        config = CurvatureConfig.for_cloud(roll300, 2)
        base = curvature_field(roll300, config)
        moved = curvature_field(rigidly_moved(roll300, rng), config)
        np.testing.assert_allclose(moved.j_inf, base.j_inf, rtol=1e-9)

    def test_identical_points_all_sentinel(self):
        cloud = PointCloud(np.tile([1.0, 2.0, 3.0], (20, 1)))
        field = curvature_field(cloud, CurvatureConfig(8, 2, 2))
        assert np.all(field.j_inf == 1.0)
        assert field.degenerate.all()
        assert field.mean == 1.0 and field.std_dev == 0.0

    def test_nondegenerate_offcenter_exceeds_one(self, roll300):
        field = curvature_field(roll300, CurvatureConfig.for_cloud(roll300, 2))
        assert np.all(field.j_inf >= 1.0)
        assert (field.j_inf > 1.0).mean() > 0.9

    def test_estimation_size_must_fit(self):
        cloud = PointCloud(np.random.default_rng(1).normal(size=(6, 3)))
        with pytest.raises(ValueError):
            curvature_field(cloud, CurvatureConfig(8, 2, 2))

    def test_csv_export(self, roll300, tmp_path):
        field = curvature_field(roll300, CurvatureConfig.for_cloud(roll300, 2))
        path = tmp_path / "curv.csv"
        field_to_csv(field, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "index,j_inf"
        assert len(lines) == roll300.n + 1
        idx, val = lines[5].split(",")
        assert int(idx) == 4
        assert float(val) == field.j_inf[4]
