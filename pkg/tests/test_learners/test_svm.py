import numpy as np
import pytest

from core.errors import DimensionMismatchError
from core.learners.svm import dual_coordinate_descent, svm_decision, svm_fit, svm_predict
from core.streams import generator


@pytest.fixture
def separable():
    """100 points split by a line through the origin with margin >= 0.2."""
    rng = generator(70)
    direction = np.array([0.6, 0.8])
    points = rng.uniform(-2, 2, size=(400, 2))
    margin = points @ direction
    points = points[np.abs(margin) >= 0.2][:100]
    labels = np.where(points @ direction > 0, 1.0, -1.0)
    return points, labels


class TestDualCoordinateDescent:
    def test_two_points(self):
        """z = (1), (-1) with labels +1, -1: w > 0 and both classified correctly."""
        model = svm_fit(np.array([[1.0], [-1.0]]), np.array([1.0, -1.0]), C=10.0)
        assert model.weights[0][0] > 0
        np.testing.assert_array_equal(svm_predict(model, np.array([[1.0], [-1.0]])), [1.0, -1.0])

    def test_duplicate_point(self):
        Z = np.array([[1.0], [1.0], [-1.0]])
        labels = np.array([1.0, 1.0, -1.0])
        model = svm_fit(Z, labels, C=10.0)
        np.testing.assert_array_equal(svm_predict(model, Z), labels)

    def test_separable_training_accuracy(self, separable):
        Z, labels = separable
        model = svm_fit(Z, labels, C=100.0, tol=1e-3, max_sweeps=5000)
        assert np.mean(svm_predict(model, Z) == labels) == 1.0

    def test_dual_feasible_every_sweep(self, separable):
        Z, labels = separable
        C = 0.5

        def check(sweep, alpha):
            assert np.all(alpha >= 0.0)
            assert np.all(alpha <= C)

        _, _, sweeps = dual_coordinate_descent(Z, labels, C, tol=1e-3, seed=1, sweep_callback=check)
        assert sweeps >= 1

    def test_primal_matches_dual(self, separable):
        """w = sum_i alpha_i y_i z_i."""
        Z, labels = separable
        w, alpha, _ = dual_coordinate_descent(Z, labels, 1.0, tol=1e-2, seed=2)
        np.testing.assert_allclose(w, (alpha * labels) @ Z, atol=1e-10)

    def test_deterministic(self, separable):
        Z, labels = separable
        assert svm_fit(Z, labels, seed=5) == svm_fit(Z, labels, seed=5)


class TestSvmModel:
    def test_rejects_non_positive_c(self):
        with pytest.raises(ValueError):
            svm_fit(np.ones((2, 1)), np.array([1.0, -1.0]), C=0.0)

    def test_rejects_single_class(self):
        with pytest.raises(ValueError):
            svm_fit(np.ones((3, 1)), np.ones(3))

    def test_label_count_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            svm_fit(np.ones((3, 1)), np.array([1.0, -1.0]))

    def test_binary_labels_kept(self):
        """Original labels (here 0/1) come back from predict."""
        model = svm_fit(np.array([[1.0], [-1.0]]), np.array([1.0, 0.0]), C=10.0)
        assert model.classes == [0.0, 1.0]
        assert svm_predict(model, np.array([2.0])) == 1.0

    def test_multi_class_one_vs_rest(self):
        rng = generator(71)
        centers = np.array([[3.0, 0.0], [0.0, 3.0], [-3.0, -3.0]])
        Z = np.vstack([rng.normal(c, 0.3, size=(30, 2)) for c in centers])
        Z = np.hstack([Z, np.ones((90, 1))])
        labels = np.repeat([1.0, 2.0, 3.0], 30)
        model = svm_fit(Z, labels, C=10.0, n_jobs=2)
        assert len(model.weights) == 3
        assert svm_decision(model, Z).shape == (90, 3)
        assert np.mean(svm_predict(model, Z) == labels) >= 0.95

    def test_decision_shape_mismatch(self):
        model = svm_fit(np.array([[1.0], [-1.0]]), np.array([1.0, -1.0]))
        with pytest.raises(DimensionMismatchError):
            svm_decision(model, np.ones((2, 2)))
