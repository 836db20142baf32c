"""
Dataset Module.

Parses and holds datasets in LIBSVM sparse text format:

    <label> <idx>:<val> <idx>:<val> ...

Feature indices are 1-based and strictly ascending within a line. Rows are
stored internally as a CSR matrix (0-based columns); explicit zero entries are
kept so that a parsed file serializes back to the same entries.
"""
import io
from pathlib import Path
from typing import List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
from loguru import logger
from scipy import sparse

from core.errors import DatasetIOError, DimensionMismatchError, LibsvmParseError
from core.models import SparseRow


class Dataset:
    """
    Immutable collection of sparse rows with optional real-valued labels.

    Attributes:
        dim: Number of feature columns p (max feature index, or an override).
        labels: Array of length N, or None.
    """

    def __init__(self, matrix: sparse.csr_matrix, labels: Optional[np.ndarray] = None):
        self._matrix = sparse.csr_matrix(matrix, dtype=np.float64)
        if labels is not None:
            labels = np.array(labels, dtype=np.float64)
            if labels.shape != (self._matrix.shape[0],):
                raise DimensionMismatchError(
                    f"labels length {labels.shape[0]} != number of rows {self._matrix.shape[0]}"
                )
            labels.setflags(write=False)
        self.labels = labels

    @classmethod
    def from_rows(cls, rows: Sequence[SparseRow], labels: Optional[Sequence[float]] = None,
                  dim: Optional[int] = None) -> 'Dataset':
        max_index = max((row.max_index for row in rows), default=0)
        if dim is None:
            dim = max_index
        elif dim < max_index:
            raise DimensionMismatchError(f"dim override {dim} is smaller than max feature index {max_index}")

        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        for n, row in enumerate(rows):
            indptr[n + 1] = indptr[n] + len(row.indices)
        indices = np.fromiter((i - 1 for row in rows for i in row.indices), dtype=np.int64, count=indptr[-1])
        values = np.fromiter((v for row in rows for v in row.values), dtype=np.float64, count=indptr[-1])
        matrix = sparse.csr_matrix((values, indices, indptr), shape=(len(rows), dim))
        return cls(matrix, None if labels is None else np.asarray(labels, dtype=np.float64))

    @classmethod
    def from_dense(cls, X: np.ndarray, labels: Optional[np.ndarray] = None) -> 'Dataset':
        return cls(sparse.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64))), labels)

    @property
    def n_rows(self) -> int:
        return self._matrix.shape[0]

    def __len__(self) -> int:
        return self.n_rows

    @property
    def dim(self) -> int:
        return self._matrix.shape[1]

    @property
    def rows(self) -> List[SparseRow]:
        m = self._matrix
        out = []
        for n in range(self.n_rows):
            lo, hi = m.indptr[n], m.indptr[n + 1]
            out.append(SparseRow(indices=[int(i) + 1 for i in m.indices[lo:hi]],
                                 values=[float(v) for v in m.data[lo:hi]]))
        return out

    def to_csr(self) -> sparse.csr_matrix:
        return self._matrix

    def dense(self) -> np.ndarray:
        return self._matrix.toarray()

    def subset(self, idx: Sequence[int]) -> 'Dataset':
        idx = np.asarray(idx, dtype=np.int64)
        labels = None if self.labels is None else self.labels[idx]
        return Dataset(self._matrix[idx], labels)

    def with_dim(self, dim: int) -> 'Dataset':
        """Return the same rows with `dim` columns (padding trailing features)."""
        if dim == self.dim:
            return self
        max_index = int(self._matrix.indices.max()) + 1 if self._matrix.nnz else 0
        if dim < max_index:
            raise DimensionMismatchError(f"dim override {dim} is smaller than max feature index {max_index}")
        m = self._matrix
        return Dataset(sparse.csr_matrix((m.data, m.indices, m.indptr), shape=(self.n_rows, dim)), self.labels)


def parse_libsvm(source: Union[str, TextIO], dim: Optional[int] = None) -> Dataset:
    """
    Parse LIBSVM text.

    Args:
        source: Text or a readable character stream. LF and CRLF line endings.
        dim: Optional column count override (must be >= max index seen).

    Returns:
        Dataset with one row per nonempty line.

    Raises:
        LibsvmParseError: Malformed token, non-ascending index or non-numeric value.
    """
    text = source if isinstance(source, str) else source.read()
    rows: List[SparseRow] = []
    labels: List[float] = []

    for line_number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        try:
            labels.append(float(tokens[0]))
        except ValueError:
            raise LibsvmParseError(line_number, f"non-numeric label '{tokens[0]}'")

        indices: List[int] = []
        values: List[float] = []
        for token in tokens[1:]:
            idx_text, sep, val_text = token.partition(':')
            if not sep or not idx_text or not val_text:
                raise LibsvmParseError(line_number, f"malformed token '{token}'")
            try:
                idx = int(idx_text)
            except ValueError:
                raise LibsvmParseError(line_number, f"non-integer index in '{token}'")
            try:
                val = float(val_text)
            except ValueError:
                raise LibsvmParseError(line_number, f"non-numeric value in '{token}'")
            if idx < 1:
                raise LibsvmParseError(line_number, f"index must be >= 1 in '{token}'")
            if indices and idx <= indices[-1]:
                raise LibsvmParseError(line_number, f"index {idx} not ascending after {indices[-1]}")
            indices.append(idx)
            values.append(val)
        rows.append(SparseRow(indices=indices, values=values))

    dataset = Dataset.from_rows(rows, labels, dim=dim)
    logger.debug(f"Dataset: parsed {dataset.n_rows} rows, dim={dataset.dim}")
    return dataset


def _fmt(value: float) -> str:
    return format(float(value), '.17g')


def serialize_libsvm(dataset: Dataset) -> str:
    """Write a dataset back to LIBSVM text (labels default to 0 when absent)."""
    buf = io.StringIO()
    labels = dataset.labels if dataset.labels is not None else np.zeros(dataset.n_rows)
    for label, row in zip(labels, dataset.rows):
        parts = [_fmt(label)]
        parts.extend(f"{i}:{_fmt(v)}" for i, v in zip(row.indices, row.values))
        buf.write(" ".join(parts))
        buf.write("\n")
    return buf.getvalue()


def load_libsvm(path: Union[str, Path], dim: Optional[int] = None) -> Dataset:
    """Read a LIBSVM file from disk."""
    try:
        with open(path, 'r') as f:
            text = f.read()
    except OSError as e:
        logger.error(f"Dataset: cannot read {path}: {e}")
        raise DatasetIOError(f"cannot read dataset '{path}': {e}") from e
    dataset = parse_libsvm(text, dim=dim)
    logger.info(f"Dataset: loaded {path} ({dataset.n_rows} rows, dim={dataset.dim})")
    return dataset


def dense_row(dataset: Dataset, i: int) -> np.ndarray:
    """
    Dense expansion of row `i` (0-based) with zeros at absent indices.

    Raises:
        IndexError: If `i` is outside [0, N).
    """
    if not 0 <= i < dataset.n_rows:
        raise IndexError(f"row {i} out of range for dataset with {dataset.n_rows} rows")
    return dataset.to_csr()[i].toarray().ravel()


def rows_matrix(X: Union[Dataset, np.ndarray, sparse.spmatrix]) -> Union[np.ndarray, sparse.csr_matrix]:
    """Return a 2-D array/CSR view of anything row-shaped."""
    if isinstance(X, Dataset):
        return X.to_csr()
    if sparse.issparse(X):
        return sparse.csr_matrix(X)
    return np.atleast_2d(np.asarray(X, dtype=np.float64))


def split_holdout(dataset: Dataset, fraction: float, rng: np.random.Generator) -> Tuple[Dataset, Dataset]:
    """Seeded train/holdout split; returns (train, holdout)."""
    perm = rng.permutation(dataset.n_rows)
    n_hold = max(1, int(round(fraction * dataset.n_rows)))
    return dataset.subset(np.sort(perm[n_hold:])), dataset.subset(np.sort(perm[:n_hold]))
