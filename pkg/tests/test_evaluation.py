import numpy as np
import pytest
from scipy import linalg

from core.data import Dataset
from core.evaluation import accuracy, estimate_frobenius_error, pca_residual
from core.features import FeatureMapParams, featurize
from core.kernels import kernel_matrix
from core.models import KernelSpec, SamplingStrategy
from core.streams import generator

SPEC = KernelSpec(gamma=1.0)


@pytest.fixture
def clustered():
    """200 points in a small cube, so kernel values are large."""
    return Dataset.from_dense(generator(60).uniform(-0.5, 0.5, size=(200, 3)))


class TestFrobeniusError:
    def test_exact_factorization(self):
        """Features = Cholesky rows of the sampled kernel block reproduce it exactly."""
        def cholesky_source(X):
            return linalg.cholesky(kernel_matrix(SPEC, X) + 1e-12 * np.eye(X.shape[0]), lower=True)

        sparse_points = Dataset.from_dense(generator(61).uniform(-3, 3, size=(40, 3)))
        estimate = estimate_frobenius_error(sparse_points, cholesky_source, SPEC, 25, seed=1)
        assert estimate.relative_error <= 1e-10
        assert estimate.sample_size == 25

    def test_zero_map(self, clustered):
        estimate = estimate_frobenius_error(clustered, lambda X: np.zeros((X.shape[0], 4)), SPEC, 50, seed=2)
        assert estimate.relative_error == pytest.approx(1.0)

    def test_sample_larger_than_dataset(self, clustered):
        with pytest.raises(ValueError):
            estimate_frobenius_error(clustered, lambda X: np.zeros((X.shape[0], 1)), SPEC, 201, seed=0)

    @pytest.mark.parametrize("m", [0, -3])
    def test_empty_sample(self, clustered, m):
        with pytest.raises(ValueError):
            estimate_frobenius_error(clustered, lambda X: np.zeros((X.shape[0], 1)), SPEC, m, seed=0)

    def test_deterministic_given_seed(self, clustered):
        params = FeatureMapParams.draw(SPEC, SamplingStrategy(seed=4), 100, 3)
        source = lambda X: featurize(params, X)  # noqa: E731
        first = estimate_frobenius_error(clustered, source, SPEC, 60, seed=9)
        second = estimate_frobenius_error(clustered, source, SPEC, 60, seed=9)
        assert first == second

    def test_random_features_concentrate(self, clustered):
        """J+ = 4000 plain RFM stays within 0.05 relative error for 20 seeds."""
        for seed in range(20):
            params = FeatureMapParams.draw(SPEC, SamplingStrategy(seed=seed), 4000, 3)
            estimate = estimate_frobenius_error(clustered, lambda X: featurize(params, X), SPEC, 200, seed=seed)
            assert estimate.relative_error <= 0.05


class TestPcaResidual:
    def test_identity(self):
        assert pca_residual(np.eye(6), 0) == pytest.approx(1.0)

    def test_full_rank_kept(self):
        K = kernel_matrix(SPEC, generator(1).normal(size=(8, 2)))
        assert pca_residual(K, 8) == 0.0

    def test_rank_one(self):
        v = generator(2).normal(size=10)
        v *= np.sqrt(10) / np.linalg.norm(v)
        assert pca_residual(np.outer(v, v), 1) == pytest.approx(0.0, abs=1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            pca_residual(np.array([[1.0, 0.5], [0.0, 1.0]]), 1)

    def test_rejects_l_out_of_range(self):
        with pytest.raises(ValueError):
            pca_residual(np.eye(3), 4)

    @pytest.mark.parametrize("l", [1, 10, 50])
    def test_residual_perturbation_bound(self, l):
        """|R_l(K) - R_l(K_hat)| <= (1 - l/m) ||K - K_hat||_F for m = 100 over 10 seeds."""
        m = 100
        for seed in range(10):
            X = generator(seed).uniform(-1, 1, size=(m, 4))
            K = kernel_matrix(SPEC, X)
            params = FeatureMapParams.draw(SPEC, SamplingStrategy(seed=1000 + seed), 200, 4)
            Z = featurize(params, X)
            K_hat = Z @ Z.T
            K_hat = 0.5 * (K_hat + K_hat.T)
            gap = abs(pca_residual(K, l) - pca_residual(K_hat, l))
            assert gap <= (1 - l / m) * np.linalg.norm(K - K_hat)


class TestAccuracy:
    def test_fraction_correct(self):
        assert accuracy(np.array([1, 0, 1, 1]), np.array([1, 1, 1, 0])) == 0.5

    def test_needs_labels(self):
        with pytest.raises(ValueError):
            accuracy(np.array([1.0]), None)
