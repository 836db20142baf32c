"""
Data Models Module.

Defines the core domain records using Pydantic for validation and type safety.
Includes kernel and sampling settings, sparse rows, compression weights,
learner models and the experiment configuration/result rows.
"""
import json
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

MAX_SEED = 2 ** 64 - 1


class KernelFamily(str, Enum):
    """Stationary kernel families with a known spectral measure."""
    RBF = 'rbf'          # exp(-gamma * ||x - y||_2^2)
    LAPLACE = 'laplace'  # exp(-gamma * ||x - y||_1)
    CAUCHY = 'cauchy'    # prod_i 1 / (1 + gamma * (x_i - y_i)^2)


class SamplingKind(str, Enum):
    MONTE_CARLO = 'mc'
    HALTON = 'halton'


class Method(str, Enum):
    RFM = 'rfm'
    RFM_JL = 'rfm-jl'
    RFM_FW = 'rfm-fw'
    RFM_GIGA = 'rfm-giga'

    @property
    def is_coreset(self) -> bool:
        return self in (Method.RFM_FW, Method.RFM_GIGA)


class Task(str, Enum):
    FROBENIUS = 'frobenius'
    CLASSIFY = 'classify'
    BOTH = 'both'


class Learner(str, Enum):
    SVM = 'svm'
    RIDGE = 'ridge'


class KernelSpec(BaseModel):
    """
    Kernel family plus bandwidth.

    Attributes:
        family: One of rbf, laplace, cauchy.
        gamma: Positive bandwidth parameter.
    """
    family: KernelFamily = KernelFamily.RBF
    gamma: float = 1.0

    @field_validator('gamma')
    @classmethod
    def positive_gamma(cls, v: float) -> float:
        if not v > 0:
            raise ValueError(f"gamma must be positive, got {v}")
        return float(v)


class SamplingStrategy(BaseModel):
    """
    How frequencies are drawn from the spectral measure.

    Attributes:
        kind: Monte-Carlo (i.i.d.) or Halton quasi-Monte-Carlo.
        seed: 64-bit seed; fully determines the draw.
        scramble: Halton only; scramble the sequence using `seed`.
    """
    kind: SamplingKind = SamplingKind.MONTE_CARLO
    seed: int = 0
    scramble: bool = False

    @field_validator('seed')
    @classmethod
    def seed_in_range(cls, v: int) -> int:
        if v < 0 or v > MAX_SEED:
            raise ValueError(f"seed must fit in 64 bits, got {v}")
        return v


class SparseRow(BaseModel):
    """
    One LIBSVM row. Feature indices are 1-based and strictly ascending.
    """
    indices: List[int] = Field(default_factory=list)
    values: List[float] = Field(default_factory=list)

    @model_validator(mode='after')
    def check_indices(self) -> 'SparseRow':
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must have the same length")
        prev = 0
        for idx in self.indices:
            if idx <= prev:
                raise ValueError(f"indices must be >= 1 and strictly ascending (got {idx} after {prev})")
            prev = idx
        return self

    @property
    def max_index(self) -> int:
        return self.indices[-1] if self.indices else 0


class WeightVector(BaseModel):
    """
    Sparse nonnegative feature weights.

    Attributes:
        j_plus: Length of the dense vector (number of candidate features).
        entries: Feature index (0-based) -> strictly positive weight.
    """
    j_plus: int
    entries: Dict[int, float] = Field(default_factory=dict)

    @model_validator(mode='after')
    def check_entries(self) -> 'WeightVector':
        for j, w in self.entries.items():
            if j < 0 or j >= self.j_plus:
                raise ValueError(f"feature index {j} outside [0, {self.j_plus})")
            if not w > 0:
                raise ValueError(f"stored weights must be strictly positive (w[{j}] = {w})")
        return self

    @property
    def support_size(self) -> int:
        return len(self.entries)

    @property
    def support(self) -> List[int]:
        return sorted(self.entries)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.j_plus, dtype=np.float64)
        for j, w in self.entries.items():
            dense[j] = w
        return dense

    @classmethod
    def from_dense(cls, weights: np.ndarray) -> 'WeightVector':
        weights = np.asarray(weights, dtype=np.float64)
        nz = np.flatnonzero(weights > 0)
        return cls(j_plus=int(weights.shape[0]), entries={int(j): float(weights[j]) for j in nz})

    @classmethod
    def ones(cls, j_plus: int) -> 'WeightVector':
        return cls(j_plus=j_plus, entries={j: 1.0 for j in range(j_plus)})

    def to_json(self) -> str:
        return json.dumps({
            "j_plus": self.j_plus,
            "entries": [[j, self.entries[j]] for j in self.support],
        })

    @classmethod
    def from_json(cls, text: str) -> 'WeightVector':
        data = json.loads(text)
        return cls(j_plus=data["j_plus"], entries={int(j): float(w) for j, w in data["entries"]})


class CompressedMapRecord(BaseModel):
    """Serialized form of a compressed feature map."""
    family: KernelFamily
    gamma: float
    j_plus: int
    feature_ids: List[int]
    omega: List[List[float]]
    b: List[float]
    scales: List[float]


class FrobeniusEstimate(BaseModel):
    relative_error: float = Field(ge=0.0)
    sample_size: int
    seed: int


class RidgeModel(BaseModel):
    """
    Primal ridge regression in feature space.

    Attributes:
        beta: Feature-space weights solving (Z^T Z + lambda I) beta = Z^T y.
        lam: Regularization strength (> 0).
    """
    beta: List[float]
    lam: float = Field(gt=0.0)


class SvmModel(BaseModel):
    """
    Linear SVM trained by dual coordinate descent, one-vs-rest.

    For two classes a single weight vector scores classes[1] against classes[0].
    """
    classes: List[float]
    weights: List[List[float]]
    C: float = Field(gt=0.0)
    tol: float = Field(gt=0.0)
    sweeps: List[int] = Field(default_factory=list)


class ExperimentConfig(BaseModel):
    """
    All experiment knobs. Built by `core.config.build_config`.
    """
    train: Optional[str] = None
    test: Optional[str] = None
    dim: Optional[int] = None
    kernel: KernelSpec = Field(default_factory=KernelSpec)
    method: Method = Method.RFM_GIGA
    sampling: SamplingKind = SamplingKind.MONTE_CARLO
    scramble: bool = False
    j_plus: int = 5000
    j: List[int] = Field(default_factory=lambda: [100])
    s_pairs: int = 20000
    trials: int = 1
    base_seed: int = 0
    task: Task = Task.FROBENIUS
    learner: Learner = Learner.SVM
    svm_c: float = Field(default=1.0, gt=0.0)
    svm_tol: float = Field(default=0.1, gt=0.0)
    svm_max_sweeps: int = Field(default=1000, ge=1)
    ridge_lambda: float = Field(default=1.0, gt=0.0)
    frob_m: int = Field(default=10000, ge=1)
    test_fraction: float = Field(default=0.2, gt=0.0, lt=1.0)
    batch_size: int = Field(default=4096, ge=1)
    n_jobs: int = 1
    timings: bool = True
    cv_gammas: List[float] = Field(default_factory=lambda: [0.1, 1.0, 10.0])
    cv_cs: List[float] = Field(default_factory=lambda: [0.1, 1.0, 10.0])
    cv_folds: int = Field(default=5, ge=2)
    cv_subsample: int = Field(default=10000, ge=2)
    out: Optional[str] = None

    @model_validator(mode='after')
    def check_sizes(self) -> 'ExperimentConfig':
        if self.j_plus < 1:
            raise ValueError("j_plus must be >= 1")
        if not self.j or any(j < 1 for j in self.j):
            raise ValueError("j must be a nonempty list of positive counts")
        if max(self.j) > self.j_plus:
            raise ValueError(f"j ({max(self.j)}) must not exceed j_plus ({self.j_plus})")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.method.is_coreset and self.s_pairs < 1:
            raise ValueError("s_pairs must be >= 1 for coreset methods")
        if self.base_seed < 0 or self.base_seed > MAX_SEED:
            raise ValueError("seed must fit in 64 bits")
        return self


class ResultRow(BaseModel):
    """One CSV line: a (method, trial, J) measurement."""
    method: Method
    j_plus: int
    j: int
    j_effective: int
    s_pairs: int
    seed: int
    rel_frob_error: Optional[float] = None
    test_accuracy: Optional[float] = None
    t_featurize_ms: float = 0.0
    t_compress_ms: float = 0.0
    t_train_ms: float = 0.0

    def sort_key(self):
        return (self.method.value, self.j, self.s_pairs, self.seed)


class CvResult(BaseModel):
    """Mean k-fold accuracy of one (gamma, C) grid point."""
    gamma: float
    C: float
    mean_accuracy: float
