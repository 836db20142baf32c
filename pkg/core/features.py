"""
Features Module.

Random Fourier feature maps

    z_j(x) = sqrt(2 / J+) * cos(omega_j . x + b_j)

The sqrt(2) amplitude makes z(x).z(y) an unbiased estimate of k(x, y), since
E cos(a + b) cos(c + b) = cos(a - c) / 2 for uniform phases.

Also provides their weighted (compressed) restriction, and the Gaussian Johnson-Lindenstrauss
projection used as the data-independent compression baseline.
"""
import json
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Union

import numpy as np
from loguru import logger
from scipy import sparse

from core.data import Dataset, rows_matrix
from core.errors import DimensionMismatchError
from core.kernels import sample_frequencies
from core.models import CompressedMapRecord, KernelSpec, SamplingStrategy, WeightVector
from core.streams import generator

DEFAULT_BATCH_ROWS = 4096
AMPLITUDE = math.sqrt(2.0)


@dataclass(frozen=True)
class FeatureMapParams:
    """
    Frequencies and phases of a J+-feature map.

    Attributes:
        omega: (J+, p) frequency matrix.
        b: (J+,) phases.
        kernel: The kernel the frequencies were drawn for (kept for serialization).
    """
    omega: np.ndarray
    b: np.ndarray
    kernel: Optional[KernelSpec] = None

    def __post_init__(self):
        if self.omega.ndim != 2 or self.b.shape != (self.omega.shape[0],):
            raise DimensionMismatchError(
                f"omega {self.omega.shape} and b {self.b.shape} do not describe the same features"
            )

    @property
    def j_plus(self) -> int:
        return self.omega.shape[0]

    @property
    def dim(self) -> int:
        return self.omega.shape[1]

    @classmethod
    def draw(cls, spec: KernelSpec, strategy: SamplingStrategy, j_plus: int, p: int,
             n_jobs: Optional[int] = 1) -> 'FeatureMapParams':
        omega, b = sample_frequencies(spec, strategy, j_plus, p, n_jobs=n_jobs)
        return cls(omega=omega, b=b, kernel=spec)

    def restrict(self, features: np.ndarray) -> 'FeatureMapParams':
        return FeatureMapParams(omega=self.omega[features], b=self.b[features], kernel=self.kernel)


def _is_single(x) -> bool:
    return not isinstance(x, Dataset) and not sparse.issparse(x) and np.ndim(x) == 1


def _projections(omega: np.ndarray, b: np.ndarray, X) -> np.ndarray:
    X = rows_matrix(X)
    if X.shape[1] != omega.shape[1]:
        raise DimensionMismatchError(f"input has dim {X.shape[1]}, feature map expects {omega.shape[1]}")
    proj = X @ omega.T
    return np.asarray(proj) + b[None, :]


def featurize(params: FeatureMapParams, x) -> np.ndarray:
    """
    Full feature vector(s).

    Args:
        params: Feature map.
        x: A length-p vector, or an (n, p) dense/sparse matrix or Dataset.

    Returns:
        (J+,) for a single vector, else (n, J+).
    """
    Z = np.cos(_projections(params.omega, params.b, x)) * (AMPLITUDE / math.sqrt(params.j_plus))
    return Z[0] if _is_single(x) else Z


def featurize_dataset(params: FeatureMapParams, dataset: Union[Dataset, np.ndarray, sparse.spmatrix],
                      batch_rows: int = DEFAULT_BATCH_ROWS) -> Iterator[np.ndarray]:
    """Featurize row batches; yields (batch, J+) blocks in row order."""
    X = rows_matrix(dataset)
    for start in range(0, X.shape[0], batch_rows):
        yield featurize(params, X[start:start + batch_rows])


class CompressedMap:
    """
    Feature map restricted to the support of a weight vector.

    Output coordinate k equals sqrt(w_j) * z_j(x) for the k-th kept feature j.
    The sqrt(2 / J+) normalization of the full map is preserved.
    """

    def __init__(self, params: FeatureMapParams, feature_ids: np.ndarray, scales: np.ndarray, j_plus: int):
        if params.j_plus != feature_ids.shape[0] or scales.shape != feature_ids.shape:
            raise DimensionMismatchError("kept frequencies, feature ids and scales must have equal length")
        self.params = params
        self.feature_ids = feature_ids
        self.scales = scales
        self.j_plus = j_plus

    @classmethod
    def from_weights(cls, params: FeatureMapParams, weights: WeightVector) -> 'CompressedMap':
        if weights.j_plus != params.j_plus:
            raise DimensionMismatchError(f"weights sized for {weights.j_plus} features, map has {params.j_plus}")
        support = np.asarray(weights.support, dtype=np.int64)
        scales = np.sqrt(np.array([weights.entries[j] for j in weights.support], dtype=np.float64))
        return cls(params.restrict(support), support, scales, params.j_plus)

    @property
    def n_features(self) -> int:
        return self.feature_ids.shape[0]

    def transform(self, x) -> np.ndarray:
        return featurize_compressed(self, x)

    def to_record(self) -> CompressedMapRecord:
        kernel = self.params.kernel or KernelSpec()
        return CompressedMapRecord(
            family=kernel.family,
            gamma=kernel.gamma,
            j_plus=self.j_plus,
            feature_ids=[int(j) for j in self.feature_ids],
            omega=self.params.omega.tolist(),
            b=self.params.b.tolist(),
            scales=self.scales.tolist(),
        )

    def to_json(self) -> str:
        return self.to_record().model_dump_json()

    @classmethod
    def from_record(cls, record: CompressedMapRecord) -> 'CompressedMap':
        k = len(record.feature_ids)
        p = len(record.omega[0]) if record.omega else 0
        params = FeatureMapParams(
            omega=np.asarray(record.omega, dtype=np.float64).reshape(k, p),
            b=np.asarray(record.b, dtype=np.float64).reshape(k),
            kernel=KernelSpec(family=record.family, gamma=record.gamma),
        )
        return cls(params, np.asarray(record.feature_ids, dtype=np.int64),
                   np.asarray(record.scales, dtype=np.float64), record.j_plus)

    @classmethod
    def from_json(cls, text: str) -> 'CompressedMap':
        return cls.from_record(CompressedMapRecord.model_validate(json.loads(text)))


def compress_map(params: FeatureMapParams, weights: WeightVector) -> CompressedMap:
    cm = CompressedMap.from_weights(params, weights)
    logger.debug(f"Features: compressed map keeps {cm.n_features}/{params.j_plus} features")
    return cm


def featurize_compressed(cm: CompressedMap, x) -> np.ndarray:
    """
    Compressed feature vector(s) of length ||w||_0.
    """
    scales = cm.scales * (AMPLITUDE / math.sqrt(cm.j_plus))
    Z = np.cos(_projections(cm.params.omega, cm.params.b, x)) * scales[None, :]
    return Z[0] if _is_single(x) else Z


def jl_matrix(seed: int, j_plus: int, j: int) -> np.ndarray:
    """(J, J+) matrix with i.i.d. Normal(0, 1/J) entries, determined by `seed`."""
    if j > j_plus:
        raise ValueError(f"JL target dimension {j} exceeds source dimension {j_plus}")
    if j < 1:
        raise ValueError(f"JL target dimension must be positive, got {j}")
    return generator(seed).normal(0.0, 1.0 / math.sqrt(j), size=(j, j_plus))


def jl_project(seed: int, j_plus: int, j: int, z: np.ndarray) -> np.ndarray:
    """
    Project feature vector(s) z (length J+) to J dimensions with A = jl_matrix(seed, J+, J).
    """
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != j_plus:
        raise DimensionMismatchError(f"vector has length {z.shape[-1]}, expected {j_plus}")
    A = jl_matrix(seed, j_plus, j)
    return z @ A.T


class JLProjector:
    """
    RFM-JL baseline: up-project to J+ features batch by batch, then project to J.
    """

    def __init__(self, params: FeatureMapParams, j: int, seed: int, batch_rows: int = DEFAULT_BATCH_ROWS):
        self.params = params
        self.j = j
        self.seed = seed
        self.batch_rows = batch_rows
        self.A = jl_matrix(seed, params.j_plus, j)

    @property
    def n_features(self) -> int:
        return self.j

    def transform(self, x) -> np.ndarray:
        X = rows_matrix(x)
        blocks = [Z @ self.A.T for Z in featurize_dataset(self.params, X, self.batch_rows)]
        if not blocks:
            return np.zeros((0, self.j))
        return np.vstack(blocks)
