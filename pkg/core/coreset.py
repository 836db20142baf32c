"""
Coreset Module.

Builds the subsampled compression problem. For S sampled datapoint pairs
(i_s, j_s) above the diagonal, row j of R holds the contribution of feature j
to each pair's inner product:

    R[j, s] = z_j(x_{i_s}) * z_j(x_{j_s})        r = sum_j R[j]

so r_s is the J+-feature kernel estimate for pair s and r(w) = w @ R is its
weighted, sparse counterpart. The solvers in `core.solvers` minimize
(1/S) ||r - r(w)||^2.
"""
from dataclasses import dataclass
from typing import Union

import numpy as np
from loguru import logger

from core.data import Dataset, rows_matrix
from core.errors import DimensionMismatchError
from core.features import FeatureMapParams, featurize
from core.models import WeightVector
from core.streams import generator

# Pair columns of R filled per block: at most this many elements in each gathered block.
PAIR_BLOCK_ELEMENTS = 1 << 20


@dataclass(frozen=True)
class PairSample:
    """
    Datapoint pairs (0-based) with first < second, drawn i.i.d. uniformly.
    """
    first: np.ndarray
    second: np.ndarray
    seed: int

    @property
    def size(self) -> int:
        return self.first.shape[0]

    @property
    def pairs(self):
        return list(zip(self.first.tolist(), self.second.tolist()))


def sample_pairs(n: int, s: int, seed: int) -> PairSample:
    """
    Draw S pairs uniformly (with replacement) from {(i, j): 0 <= i < j < N}.

    An ordered pair of distinct indices is drawn uniformly and then sorted, which
    is uniform over the N(N-1)/2 unordered pairs.

    Raises:
        ValueError: If N < 2 or S < 1.
    """
    if n < 2:
        raise ValueError(f"need at least two datapoints to sample pairs, got N={n}")
    if s < 1:
        raise ValueError(f"need S >= 1, got {s}")
    rng = generator(seed)
    a = rng.integers(0, n, size=s)
    b = rng.integers(0, n - 1, size=s)
    b = b + (b >= a)
    return PairSample(first=np.minimum(a, b), second=np.maximum(a, b), seed=seed)


def all_pairs(n: int) -> PairSample:
    """Every pair above the diagonal, row-major; used for exact objectives on small N."""
    first, second = np.triu_indices(n, k=1)
    return PairSample(first=first.astype(np.int64), second=second.astype(np.int64), seed=-1)


class CoresetProblem:
    """
    The matrix R (J+ x S), target r = column sums of R, and the per-row scales

        sigma_j = ||R_j|| / sqrt(S)        sigma = sum_j sigma_j

    that define the Frank-Wolfe polytope sum_j w_j sigma_j = sigma.
    """

    def __init__(self, R: np.ndarray):
        self.R = np.ascontiguousarray(R, dtype=np.float64)
        # same reduction as reconstruction(), so r(1) == r bit for bit
        self.r = self.reconstruction(np.ones(self.R.shape[0]))
        self.row_norms = np.sqrt(np.einsum('js,js->j', self.R, self.R))
        self.sigma_j = self.row_norms / np.sqrt(self.n_pairs)
        self.sigma = float(self.sigma_j.sum())

    @property
    def j_plus(self) -> int:
        return self.R.shape[0]

    @property
    def n_pairs(self) -> int:
        return self.R.shape[1]

    def reconstruction(self, weights: np.ndarray) -> np.ndarray:
        """r(w) = sum_j w_j R_j."""
        return weights @ self.R


def build_problem(dataset: Union[Dataset, np.ndarray], params: FeatureMapParams, ps: PairSample) -> CoresetProblem:
    """
    Featurize only the rows touched by the pair sample and assemble R.
    """
    X = rows_matrix(dataset)
    if ps.size and max(int(ps.first.max()), int(ps.second.max())) >= X.shape[0]:
        raise DimensionMismatchError(f"pair sample refers to rows beyond N={X.shape[0]}")

    touched, inverse = np.unique(np.concatenate([ps.first, ps.second]), return_inverse=True)
    Z = featurize(params, X[touched])
    first, second = inverse[:ps.size], inverse[ps.size:]
    R = np.empty((Z.shape[1], ps.size))
    block = max(1, PAIR_BLOCK_ELEMENTS // max(1, Z.shape[1]))
    for a in range(0, ps.size, block):
        b = min(a + block, ps.size)
        np.multiply(Z[first[a:b]].T, Z[second[a:b]].T, out=R[:, a:b])
    logger.debug(f"Coreset: built {R.shape[0]}x{R.shape[1]} problem from {touched.shape[0]} featurized rows")
    return CoresetProblem(R)


def _dense_weights(cp: CoresetProblem, w: Union[WeightVector, np.ndarray]) -> np.ndarray:
    if isinstance(w, WeightVector):
        if w.j_plus != cp.j_plus:
            raise DimensionMismatchError(f"weights sized for {w.j_plus} features, problem has {cp.j_plus}")
        return w.to_dense()
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (cp.j_plus,):
        raise DimensionMismatchError(f"weights have shape {w.shape}, problem has {cp.j_plus} features")
    return w


def objective(cp: CoresetProblem, w: Union[WeightVector, np.ndarray]) -> float:
    """(1/S) ||r - r(w)||^2."""
    residual = cp.r - cp.reconstruction(_dense_weights(cp, w))
    return float(residual @ residual) / cp.n_pairs
