"""
Linear SVM Learner (dual coordinate descent).

Each binary problem solves the box-constrained dual of the L1-loss SVM without
bias,

    min_a  1/2 a^T Qbar a - 1^T a     s.t. 0 <= a_i <= C,   Qbar_ij = y_i y_j z_i . z_j

one coordinate at a time while maintaining w = sum_i a_i y_i z_i. Coordinates
are visited in a seeded random permutation each sweep; training stops when the
largest projected-gradient violation of a sweep is <= tol.
Multi-class labels are handled one-vs-rest.
"""
from typing import Callable, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from loguru import logger

from core.errors import DimensionMismatchError
from core.models import SvmModel
from core.streams import derive_seed, generator


def dual_coordinate_descent(Z: np.ndarray, y: np.ndarray, C: float, tol: float, seed: int,
                            max_sweeps: int = 1000,
                            sweep_callback: Optional[Callable[[int, np.ndarray], None]] = None
                            ) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    Solve one binary problem with labels y in {-1, +1}.

    Returns:
        (w, alpha, sweeps performed)
    """
    n, n_features = Z.shape
    rng = generator(seed)
    alpha = np.zeros(n)
    w = np.zeros(n_features)
    q_diag = np.einsum('ij,ij->i', Z, Z)

    sweep = 0
    for sweep in range(1, max_sweeps + 1):
        violation = 0.0
        for i in rng.permutation(n):
            if q_diag[i] <= 0.0:
                continue
            g = y[i] * (w @ Z[i]) - 1.0
            if alpha[i] == 0.0:
                pg = min(g, 0.0)
            elif alpha[i] == C:
                pg = max(g, 0.0)
            else:
                pg = g
            violation = max(violation, abs(pg))
            if pg != 0.0:
                old = alpha[i]
                alpha[i] = min(max(old - g / q_diag[i], 0.0), C)
                w += (alpha[i] - old) * y[i] * Z[i]
        if sweep_callback:
            sweep_callback(sweep, alpha)
        if violation <= tol:
            break
    else:
        logger.warning(f"SVM: reached {max_sweeps} sweeps without meeting tol={tol}")
    return w, alpha, sweep


def svm_fit(Z: np.ndarray, labels: np.ndarray, C: float = 1.0, tol: float = 0.1, seed: int = 0,
            max_sweeps: int = 1000, n_jobs: Optional[int] = 1) -> SvmModel:
    """
    Train a one-vs-rest linear SVM.

    Raises:
        ValueError: If C <= 0 or fewer than two classes are present.
    """
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.float64).ravel()
    if Z.shape[0] != labels.shape[0]:
        raise DimensionMismatchError(f"Z has {Z.shape[0]} rows but {labels.shape[0]} labels were given")
    classes = sorted(set(labels.tolist()))
    if len(classes) < 2:
        raise ValueError("SVM training needs at least two classes")

    positives = classes[1:] if len(classes) == 2 else classes
    jobs = [
        delayed(dual_coordinate_descent)(
            Z, np.where(labels == c, 1.0, -1.0), C, tol, derive_seed(seed, f"svm-{k}"), max_sweeps
        )
        for k, c in enumerate(positives)
    ]
    results = Parallel(n_jobs=n_jobs, prefer="threads")(jobs)

    weights: List[List[float]] = [w.tolist() for w, _, _ in results]
    sweeps = [s for _, _, s in results]
    logger.debug(f"SVM: trained {len(weights)} binary problems, sweeps={sweeps}")
    return SvmModel(classes=classes, weights=weights, C=C, tol=tol, sweeps=sweeps)


def svm_decision(model: SvmModel, Z: np.ndarray) -> np.ndarray:
    W = np.asarray(model.weights)
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    if Z.shape[1] != W.shape[1]:
        raise DimensionMismatchError(f"features have length {Z.shape[1]}, model expects {W.shape[1]}")
    return Z @ W.T


def svm_predict(model: SvmModel, z: np.ndarray):
    """Predicted class for one feature vector, or an array of classes for a matrix."""
    single = np.ndim(z) == 1
    scores = svm_decision(model, z)
    if len(model.classes) == 2:
        predicted = np.where(scores[:, 0] > 0, model.classes[1], model.classes[0])
    else:
        predicted = np.asarray(model.classes)[np.argmax(scores, axis=1)]
    return float(predicted[0]) if single else predicted
