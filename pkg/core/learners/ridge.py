"""
Ridge Regression Learner.

Primal ridge regression on a feature matrix Z:

    beta = (Z^T Z + lambda I)^{-1} Z^T y

solved through a Cholesky factorization of the (J x J) regularized Gram matrix.
The Gram matrix and Z^T y are accumulated over row blocks, optionally in parallel.
"""
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from loguru import logger
from scipy import linalg

from core.errors import DimensionMismatchError
from core.models import RidgeModel

GRAM_BLOCK_ROWS = 8192


def _block_gram(block: np.ndarray, y_block: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return block.T @ block, block.T @ y_block


def ridge_fit(Z: np.ndarray, y: np.ndarray, lam: float, n_jobs: Optional[int] = 1) -> RidgeModel:
    """
    Fit feature-space ridge regression.

    Args:
        Z: (N, J) feature matrix.
        y: (N,) targets.
        lam: Regularization strength, > 0.
        n_jobs: Threads accumulating the per-block Gram matrices.
    """
    if not lam > 0:
        raise ValueError(f"ridge lambda must be positive, got {lam}")
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if Z.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"Z has {Z.shape[0]} rows but y has {y.shape[0]} entries")

    n_features = Z.shape[1]
    gram = np.zeros((n_features, n_features))
    rhs = np.zeros(n_features)
    starts = range(0, Z.shape[0], GRAM_BLOCK_ROWS)
    # block sums are added in row order, so the result does not depend on n_jobs
    parts = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_block_gram)(Z[s:s + GRAM_BLOCK_ROWS], y[s:s + GRAM_BLOCK_ROWS]) for s in starts
    )
    for block_gram, block_rhs in parts:
        gram += block_gram
        rhs += block_rhs
    gram[np.diag_indices_from(gram)] += lam

    factor = linalg.cho_factor(gram, lower=True)
    beta = linalg.cho_solve(factor, rhs)
    return RidgeModel(beta=beta.tolist(), lam=lam)


def ridge_predict(model: RidgeModel, z: np.ndarray):
    """Prediction z^T beta for one feature vector (float) or each row of a matrix (array)."""
    beta = np.asarray(model.beta)
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != beta.shape[0]:
        raise DimensionMismatchError(f"feature vector has length {z.shape[-1]}, model expects {beta.shape[0]}")
    out = z @ beta
    return float(out) if z.ndim == 1 else out


class RidgeClassifier:
    """One-vs-rest classification by ridge regression onto +-1 targets."""

    def __init__(self, lam: float = 1.0, n_jobs: Optional[int] = 1):
        self.lam = lam
        self.n_jobs = n_jobs
        self.classes: List[float] = []
        self.models: List[RidgeModel] = []

    def fit(self, Z: np.ndarray, labels: np.ndarray) -> 'RidgeClassifier':
        labels = np.asarray(labels)
        self.classes = sorted(set(float(c) for c in labels))
        if len(self.classes) < 2:
            raise ValueError("need at least two classes to train a classifier")
        positives = self.classes[1:] if len(self.classes) == 2 else self.classes
        self.models = [ridge_fit(Z, np.where(labels == c, 1.0, -1.0), self.lam, self.n_jobs) for c in positives]
        logger.debug(f"RidgeClassifier: fitted {len(self.models)} problems over {len(self.classes)} classes")
        return self

    def predict(self, Z: np.ndarray) -> np.ndarray:
        Z = np.atleast_2d(Z)
        scores = np.column_stack([ridge_predict(m, Z) for m in self.models])
        if len(self.classes) == 2:
            return np.where(scores[:, 0] > 0, self.classes[1], self.classes[0])
        return np.asarray(self.classes)[np.argmax(scores, axis=1)]
