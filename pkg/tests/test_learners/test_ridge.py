import numpy as np
import pytest
from scipy import linalg

from core.errors import DimensionMismatchError
from core.features import FeatureMapParams, featurize
from core.kernels import kernel_matrix
from core.learners.ridge import RidgeClassifier, ridge_fit, ridge_predict
from core.models import KernelSpec, SamplingStrategy
from core.streams import generator


class TestRidgeFit:
    def test_one_dimensional_closed_form(self):
        """Z = [[1], [2]], y = (1, 2), lambda = 1: beta = 5 / 6."""
        model = ridge_fit(np.array([[1.0], [2.0]]), np.array([1.0, 2.0]), 1.0)
        assert model.beta == [pytest.approx(5 / 6)]
        assert ridge_predict(model, np.array([1.0])) == pytest.approx(5 / 6)

    def test_zero_targets(self):
        Z = generator(1).normal(size=(20, 5))
        model = ridge_fit(Z, np.zeros(20), 0.5)
        np.testing.assert_array_equal(model.beta, np.zeros(5))

    def test_shrinks_with_lambda(self):
        rng = generator(2)
        Z, y = rng.normal(size=(50, 8)), rng.normal(size=50)
        norms = [np.linalg.norm(ridge_fit(Z, y, lam).beta) for lam in (1.0, 10.0, 100.0)]
        assert norms[0] > norms[1] > norms[2]

    def test_normal_equations_residual(self):
        rng = generator(3)
        Z, y = rng.normal(size=(200, 30)), rng.normal(size=200)
        beta = np.asarray(ridge_fit(Z, y, 0.1).beta)
        residual = (Z.T @ Z + 0.1 * np.eye(30)) @ beta - Z.T @ y
        assert np.linalg.norm(residual) <= 1e-8 * np.linalg.norm(Z.T @ y)

    def test_parallel_blocks_match_serial(self, monkeypatch):
        monkeypatch.setattr("core.learners.ridge.GRAM_BLOCK_ROWS", 16)
        rng = generator(7)
        Z, y = rng.normal(size=(100, 6)), rng.normal(size=100)
        assert ridge_fit(Z, y, 1.0, n_jobs=3) == ridge_fit(Z, y, 1.0, n_jobs=1)

    def test_matches_dual_form(self):
        """z^T beta equals k_x^T (Z Z^T + lambda I)^-1 y with k_x = Z z."""
        rng = generator(4)
        Z, y, z = rng.normal(size=(40, 15)), rng.normal(size=40), rng.normal(size=15)
        lam = 2.0
        dual = (Z @ z) @ np.linalg.solve(Z @ Z.T + lam * np.eye(40), y)
        assert ridge_predict(ridge_fit(Z, y, lam), z) == pytest.approx(dual, abs=1e-8)

    def test_rejects_non_positive_lambda(self):
        with pytest.raises(ValueError):
            ridge_fit(np.ones((2, 1)), np.ones(2), 0.0)

    def test_row_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            ridge_fit(np.ones((3, 2)), np.ones(2), 1.0)

    def test_predict_shape_mismatch(self):
        model = ridge_fit(np.ones((3, 2)), np.ones(3), 1.0)
        with pytest.raises(DimensionMismatchError):
            ridge_predict(model, np.ones(3))


class TestRidgeStability:
    def test_prediction_gap_bounded_by_gram_error(self):
        """
        With |y| <= M, lambda = N lambda0 and k(x, x) <= 1, the exact and the
        feature-space predictors differ by at most M / (lambda0^2 N) ||K_hat - K||_F.
        """
        n, lam0, spec = 100, 0.05, KernelSpec(gamma=0.5)
        lam = n * lam0
        for seed in range(10):
            rng = generator(seed)
            X, X_test = rng.uniform(-1, 1, size=(n, 3)), rng.uniform(-1, 1, size=(50, 3))
            y = rng.uniform(-1, 1, size=n)
            bound_scale = np.max(np.abs(y)) / (lam0 ** 2 * n)

            K = kernel_matrix(spec, X)
            exact = kernel_matrix(spec, X_test, X) @ linalg.solve(K + lam * np.eye(n), y, assume_a='pos')

            params = FeatureMapParams.draw(spec, SamplingStrategy(seed=500 + seed), 300, 3)
            Z = featurize(params, X)
            approx = ridge_predict(ridge_fit(Z, y, lam), featurize(params, X_test))

            gap = np.max(np.abs(approx - exact))
            assert gap <= bound_scale * np.linalg.norm(Z @ Z.T - K)


class TestRidgeClassifier:
    def test_binary(self):
        rng = generator(5)
        Z = np.vstack([rng.normal(2.0, 0.3, size=(30, 2)), rng.normal(-2.0, 0.3, size=(30, 2))])
        labels = np.array([1.0] * 30 + [-1.0] * 30)
        clf = RidgeClassifier(lam=0.1).fit(Z, labels)
        np.testing.assert_array_equal(clf.predict(Z), labels)

    def test_multi_class(self):
        rng = generator(6)
        centers = np.array([[3.0, 0.0], [0.0, 3.0], [-3.0, -3.0]])
        Z = np.vstack([rng.normal(c, 0.3, size=(20, 2)) for c in centers])
        Z = np.hstack([Z, np.ones((60, 1))])
        labels = np.repeat([0.0, 1.0, 2.0], 20)
        clf = RidgeClassifier(lam=0.1).fit(Z, labels)
        assert len(clf.models) == 3
        assert np.mean(clf.predict(Z) == labels) >= 0.95

    def test_single_class(self):
        with pytest.raises(ValueError):
            RidgeClassifier().fit(np.ones((4, 2)), np.ones(4))
