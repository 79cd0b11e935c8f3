import numpy as np
import pytest

from adaknn.core import PointCloud, pairwise_euclidean
from adaknn.evaluation import residual_variance
from adaknn.lle import lle_embed, reconstruction_weights, save_embedding_csv
from adaknn.neighbors import knn

from conftest import random_rotation


def row_residual(cloud, weights, i):
    recon = weights.weights[i] @ cloud.points
    return np.linalg.norm(cloud.points[i] - recon)


class TestReconstructionWeights:
    def test_centroid_of_three_neighbors(self):
        pts = np.array(
            [
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [-0.5, 0.9, 0.0],
                [-0.5, -0.9, 0.0],
            ]
        )
        cloud = PointCloud(pts)
        weights = reconstruction_weights(cloud, knn(cloud, 3))
        np.testing.assert_allclose(weights.weights[0, 1:], 1.0 / 3.0, atol=1e-10)
        assert row_residual(cloud, weights, 0) < 1e-10

    def test_affine_hull_zero_residual_without_reg(self):
        # first point is a known affine combination of its four neighbors
        nbrs = np.array(
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.5, 0.0], [0.4, -1.0, 0.0]]
        )
        alpha = np.array([0.4, 0.3, 0.2, 0.1])
        x = alpha @ nbrs
        cloud = PointCloud(np.vstack((x, nbrs)))
        weights = reconstruction_weights(cloud, knn(cloud, 4), reg=0.0)
        assert weights.weights[0].sum() == pytest.approx(1.0, abs=1e-8)
        assert row_residual(cloud, weights, 0) < 1e-8

    def test_duplicate_neighbors_regularized(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 1.0], [1.0, 1.0], [5.0, 5.0]])
        cloud = PointCloud(pts)
        weights = reconstruction_weights(cloud, knn(cloud, 3), reg=1e-3)
        row = weights.weights[0]
        assert np.all(np.isfinite(row))
        assert row.sum() == pytest.approx(1.0, abs=1e-8)

    def test_fully_collapsed_neighborhood_uniform(self):
        pts = np.tile([2.0, 3.0], (6, 1))
        cloud = PointCloud(pts)
        weights = reconstruction_weights(cloud, knn(cloud, 4))
        np.testing.assert_allclose(
            weights.weights[0][weights.weights[0] > 0], 0.25, atol=1e-12
        )

    def test_rows_sum_to_one_fixed_and_per_point(self, roll300):
        for k in (8, np.random.default_rng(3).integers(3, 12, size=roll300.n)):
            graph = knn(roll300, k)
            weights = reconstruction_weights(roll300, graph)
            np.testing.assert_allclose(weights.weights.sum(axis=1), 1.0, atol=1e-8)

    def test_support_matches_graph(self, roll300):
        graph = knn(roll300, 6)
        weights = reconstruction_weights(roll300, graph)
        for i in (0, 100, 299):
            support = np.nonzero(weights.weights[i])[0]
            assert set(support) <= set(graph.neighbors(i)[0].tolist())
            assert weights.weights[i, i] == 0.0

    def test_translation_invariance(self, roll300):
        graph = knn(roll300, 8)
        base = reconstruction_weights(roll300, graph).weights
        shifted = PointCloud(roll300.points + np.array([100.0, -40.0, 7.0]))
        after = reconstruction_weights(shifted, knn(shifted, 8)).weights
        np.testing.assert_allclose(after, base, atol=1e-8)

    def test_rotation_equivariance(self, roll300):
        rng = np.random.default_rng(14)
        rot = random_rotation(3, rng)
        rotated = PointCloud(roll300.points @ rot.T)
        base = reconstruction_weights(roll300, knn(roll300, 8)).weights
        after = reconstruction_weights(rotated, knn(rotated, 8)).weights
        np.testing.assert_allclose(after, base, atol=1e-8)

    def test_rejects_negative_reg(self, roll300):
        with pytest.raises(ValueError):
            reconstruction_weights(roll300, knn(roll300, 5), reg=-1.0)


class TestLleEmbed:
    def test_alignment_matrix_psd_and_null_vector(self, roll300):
        graph = knn(roll300, 8)
        weights = reconstruction_weights(roll300, graph)
        residual_op = np.eye(roll300.n) - weights.weights
        m_mat = residual_op.T @ residual_op
        eigvals = np.linalg.eigvalsh(m_mat)
        assert eigvals[0] > -1e-8
        assert abs(eigvals[0]) < 1e-8  # constant vector in the null space
        rng = np.random.default_rng(0)
        for _ in range(5):
            y = rng.normal(size=roll300.n)
            assert y @ m_mat @ y >= -1e-8

    def test_output_columns_centered_orthogonal(self, roll300):
        weights = reconstruction_weights(roll300, knn(roll300, 8))
        emb = lle_embed(weights, 2)
        assert emb.coords.shape == (roll300.n, 2)
        np.testing.assert_allclose(emb.coords.mean(axis=0), 0.0, atol=1e-8)
        cross = emb.coords[:, 0] @ emb.coords[:, 1]
        assert abs(cross) / roll300.n < 1e-8

    def test_flat_manifold_self_embedding(self):
        rng = np.random.default_rng(6)
        xs, ys = np.meshgrid(np.arange(15.0), np.arange(15.0))
        pts = np.column_stack((xs.ravel(), ys.ravel())) + rng.normal(
            scale=0.05, size=(225, 2)
        )
        cloud = PointCloud(pts)
        weights = reconstruction_weights(cloud, knn(cloud, 10))
        emb = lle_embed(weights, 2)
        report = residual_variance(
            pairwise_euclidean(cloud), pairwise_euclidean(PointCloud(emb.coords))
        )
        assert report.residual_variance < 0.05

    def test_bad_target_dim(self, roll300):
        weights = reconstruction_weights(roll300, knn(roll300, 8))
        with pytest.raises(ValueError):
            lle_embed(weights, 0)
        with pytest.raises(ValueError):
            lle_embed(weights, roll300.n)

    def test_embedding_csv(self, tmp_path, roll300):
        weights = reconstruction_weights(roll300, knn(roll300, 8))
        emb = lle_embed(weights, 2)
        path = tmp_path / "emb.csv"
        save_embedding_csv(emb, path)
        reloaded = np.array(
            [[float(v) for v in line.split(",")] for line in path.read_text().splitlines()]
        )
        assert np.array_equal(reloaded, emb.coords)
