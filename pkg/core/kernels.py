"""
Kernels Module.

Exact evaluation of stationary kernels and sampling of frequencies from their
spectral measure, by Monte-Carlo or Halton quasi-Monte-Carlo.

Spectral measures (per coordinate):
    rbf      exp(-gamma ||d||_2^2)        -> Normal(0, variance 2*gamma)
    laplace  exp(-gamma ||d||_1)          -> Cauchy(0, scale gamma)
    cauchy   prod 1 / (1 + gamma d_i^2)   -> Laplace(0, scale sqrt(gamma))
Phases b are uniform on [0, 2*pi].
"""
import math
from typing import Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from loguru import logger
from scipy import sparse, special
from scipy.stats import qmc

from core.errors import DimensionMismatchError
from core.models import KernelFamily, KernelSpec, SamplingKind, SamplingStrategy
from core.streams import BLOCK_ROWS, block_generator, row_blocks

TWO_PI = 2.0 * math.pi
_U_EPS = 1e-15
# Upper bound on elements of one pairwise-difference block.
_CHUNK_ELEMENTS = 1 << 22


def eval_kernel(spec: KernelSpec, x: np.ndarray, y: np.ndarray) -> float:
    """
    Evaluate k(x, y).

    Raises:
        DimensionMismatchError: If x and y differ in length.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise DimensionMismatchError(f"kernel arguments have lengths {x.shape[0]} and {y.shape[0]}")
    delta = x - y
    if spec.family == KernelFamily.RBF:
        return float(np.exp(-spec.gamma * np.dot(delta, delta)))
    if spec.family == KernelFamily.LAPLACE:
        return float(np.exp(-spec.gamma * np.abs(delta).sum()))
    return float(np.exp(-np.log1p(spec.gamma * delta * delta).sum()))


def _dense(X) -> np.ndarray:
    if sparse.issparse(X):
        return X.toarray()
    return np.atleast_2d(np.asarray(X, dtype=np.float64))


def kernel_matrix(spec: KernelSpec, X, Y=None) -> np.ndarray:
    """
    Exact kernel block K[i, j] = k(X_i, Y_j).

    Args:
        spec: Kernel specification.
        X: (m, p) dense array or sparse matrix.
        Y: (n, p) rows; defaults to X.
    """
    symmetric = Y is None
    if symmetric:
        Y = X
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatchError(f"kernel blocks have dims {X.shape[1]} and {Y.shape[1]}")

    if spec.family == KernelFamily.RBF:
        # sparse-friendly: ||x||^2 + ||y||^2 - 2 x.y
        if sparse.issparse(X):
            xx = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        else:
            X = _dense(X)
            xx = np.einsum('ij,ij->i', X, X)
        if sparse.issparse(Y):
            yy = np.asarray(Y.multiply(Y).sum(axis=1)).ravel()
        else:
            Y = _dense(Y)
            yy = np.einsum('ij,ij->i', Y, Y)
        cross = X @ Y.T
        cross = cross.toarray() if sparse.issparse(cross) else np.asarray(cross)
        sq = np.maximum(xx[:, None] + yy[None, :] - 2.0 * cross, 0.0)
        K = np.exp(-spec.gamma * sq)
        if symmetric:
            np.fill_diagonal(K, 1.0)
        return K

    Xd, Yd = _dense(X), _dense(Y)
    K = np.empty((Xd.shape[0], Yd.shape[0]), dtype=np.float64)
    chunk = max(1, _CHUNK_ELEMENTS // max(1, Yd.shape[0] * Yd.shape[1]))
    for start in range(0, Xd.shape[0], chunk):
        delta = Xd[start:start + chunk, None, :] - Yd[None, :, :]
        if spec.family == KernelFamily.LAPLACE:
            K[start:start + chunk] = np.exp(-spec.gamma * np.abs(delta).sum(axis=2))
        else:
            K[start:start + chunk] = np.exp(-np.log1p(spec.gamma * delta * delta).sum(axis=2))
    return K


def halton_points(n: int, dim: int, start: int = 1, scramble: bool = False, seed: int = 0) -> np.ndarray:
    """
    Points start..start+n-1 of the Halton sequence in the first `dim` prime bases.

    Index 0 (the origin) is skipped by default so every coordinate lies in (0, 1).
    """
    engine = qmc.Halton(d=dim, scramble=scramble, seed=seed if scramble else None)
    if start:
        engine.fast_forward(start)
    return engine.random(n)


def inverse_cdf(family: KernelFamily, gamma: float, u: np.ndarray) -> np.ndarray:
    """Map uniforms through the per-coordinate inverse CDF of the spectral measure."""
    u = np.clip(np.asarray(u, dtype=np.float64), _U_EPS, 1.0 - _U_EPS)
    if family == KernelFamily.RBF:
        return math.sqrt(2.0 * gamma) * special.ndtri(u)
    if family == KernelFamily.LAPLACE:
        return gamma * np.tan(math.pi * (u - 0.5))
    centered = u - 0.5
    return -math.sqrt(gamma) * np.sign(centered) * np.log1p(-2.0 * np.abs(centered))


def _draw_block(spec: KernelSpec, seed: int, block: int, rows: int, p: int) -> Tuple[np.ndarray, np.ndarray]:
    rng = block_generator(seed, block)
    phase_rng = block_generator(seed, block, lane=1)
    if spec.family == KernelFamily.RBF:
        omega = rng.normal(0.0, math.sqrt(2.0 * spec.gamma), size=(rows, p))
    elif spec.family == KernelFamily.LAPLACE:
        omega = spec.gamma * rng.standard_cauchy(size=(rows, p))
    else:
        omega = rng.laplace(0.0, math.sqrt(spec.gamma), size=(rows, p))
    b = phase_rng.uniform(0.0, TWO_PI, size=rows)
    return omega, b


def sample_frequencies(spec: KernelSpec, strategy: SamplingStrategy, j_plus: int, p: int,
                       n_jobs: Optional[int] = 1) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw J+ frequency rows and phases.

    Monte-Carlo rows are produced in counter blocks of `BLOCK_ROWS`; block k only
    depends on (seed, k), so blocks may be drawn concurrently and the first J rows
    of a J+ draw equal a J draw with the same seed.

    Returns:
        (omega of shape (j_plus, p), b of shape (j_plus,))
    """
    if j_plus < 1 or p < 1:
        raise ValueError(f"need j_plus >= 1 and p >= 1 (got {j_plus}, {p})")

    if strategy.kind == SamplingKind.HALTON:
        points = halton_points(j_plus, p + 1, start=1, scramble=strategy.scramble, seed=strategy.seed)
        omega = inverse_cdf(spec.family, spec.gamma, points[:, :p])
        b = TWO_PI * points[:, p]
    elif strategy.kind == SamplingKind.MONTE_CARLO:
        blocks = list(row_blocks(j_plus, BLOCK_ROWS))
        if n_jobs == 1 or len(blocks) == 1:
            parts = [_draw_block(spec, strategy.seed, k, stop - start, p) for k, start, stop in blocks]
        else:
            parts = Parallel(n_jobs=n_jobs, prefer="threads")(
                delayed(_draw_block)(spec, strategy.seed, k, stop - start, p) for k, start, stop in blocks
            )
        omega = np.vstack([o for o, _ in parts])
        b = np.concatenate([b for _, b in parts])
    else:
        raise ValueError(f"unsupported sampling strategy {strategy.kind}")

    logger.debug(f"Kernels: sampled {j_plus}x{p} frequencies ({spec.family.value}, {strategy.kind.value})")
    return omega, b
