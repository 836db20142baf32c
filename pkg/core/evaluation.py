"""
Evaluation Module.

Kernel-approximation quality metrics:
- relative Frobenius error ||Z Z^T - K||_F / ||K||_F on a sampled row subset,
- the average kernel-PCA residual sum_{i > l} lambda_i / m,
- classification accuracy.
"""
from typing import Callable, Optional

import numpy as np
from loguru import logger
from scipy import linalg

from core.data import Dataset
from core.errors import DimensionMismatchError
from core.kernels import kernel_matrix
from core.models import FrobeniusEstimate, KernelSpec
from core.streams import generator

# Maps an (m, p) row block (CSR or dense) to an (m, J) feature matrix.
FeatureSource = Callable[[object], np.ndarray]

SYMMETRY_TOL = 1e-8
FROBENIUS_BLOCK_ROWS = 1024


def estimate_frobenius_error(dataset: Dataset, approx: FeatureSource, spec: KernelSpec, m: int,
                             seed: int) -> FrobeniusEstimate:
    """
    Sample m rows without replacement and compare the approximate Gram block
    with the exact kernel block.

    Raises:
        ValueError: If m < 1 or m > N.
    """
    if m < 1:
        raise ValueError(f"need at least one sampled row, got m={m}")
    if m > dataset.n_rows:
        raise ValueError(f"cannot sample {m} rows from a dataset of {dataset.n_rows}")
    rows = np.sort(generator(seed).choice(dataset.n_rows, size=m, replace=False))
    X = dataset.to_csr()[rows]

    Z = np.atleast_2d(np.asarray(approx(X), dtype=np.float64))
    if Z.shape[0] != m:
        raise DimensionMismatchError(f"feature source returned {Z.shape[0]} rows for {m} inputs")

    # accumulate over row blocks; never holds two m x m matrices
    diff_sq = 0.0
    kernel_sq = 0.0
    for start in range(0, m, FROBENIUS_BLOCK_ROWS):
        stop = min(start + FROBENIUS_BLOCK_ROWS, m)
        K = kernel_matrix(spec, X[start:stop], X)
        diff = Z[start:stop] @ Z.T - K
        diff_sq += float(np.einsum('ij,ij->', diff, diff))
        kernel_sq += float(np.einsum('ij,ij->', K, K))
    error = float(np.sqrt(diff_sq / kernel_sq))
    logger.debug(f"Evaluation: relative Frobenius error {error:.5f} on {m} sampled rows")
    return FrobeniusEstimate(relative_error=error, sample_size=m, seed=seed)


def pca_residual(K_like: np.ndarray, l: int) -> float:
    """
    Average residual of rank-l kernel PCA: sum of all but the l largest
    eigenvalues, divided by m.

    Raises:
        ValueError: If the matrix is not square/symmetric or l is outside [0, m].
    """
    K_like = np.asarray(K_like, dtype=np.float64)
    if K_like.ndim != 2 or K_like.shape[0] != K_like.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {K_like.shape}")
    m = K_like.shape[0]
    if not 0 <= l <= m:
        raise ValueError(f"l must lie in [0, {m}], got {l}")
    scale = max(1.0, float(np.abs(K_like).max())) if m else 1.0
    if not np.allclose(K_like, K_like.T, atol=SYMMETRY_TOL * scale, rtol=0.0):
        raise ValueError("pca_residual needs a symmetric matrix")
    if m == 0:
        return 0.0
    eigenvalues = linalg.eigvalsh(K_like)[::-1]
    return float(eigenvalues[l:].sum() / m)


def accuracy(predicted: np.ndarray, labels: Optional[np.ndarray]) -> float:
    if labels is None or len(labels) == 0:
        raise ValueError("accuracy needs labelled data")
    return float(np.mean(np.asarray(predicted) == np.asarray(labels)))
