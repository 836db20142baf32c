"""
Experiment Harness.

End-to-end experiments: load data, draw the J+ frequencies of each trial once,
build features with every requested method from that shared draw, evaluate the
requested metrics and emit CSV rows. Also hosts the sweeps over S and J, the
hyperparameter cross-validation and the compressed-map export.
"""
import csv
import io
import sys
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from loguru import logger
from pydantic import BaseModel, ValidationError

from core.data import Dataset, load_libsvm, split_holdout
from core.errors import ConfigError, DatasetIOError
from core.evaluation import accuracy, estimate_frobenius_error
from core.features import CompressedMap, FeatureMapParams, compress_map, featurize
from core.learners.ridge import RidgeClassifier
from core.learners.svm import svm_fit, svm_predict
from core.methods import FittedMap, build_method
from core.models import (CvResult, ExperimentConfig, KernelSpec, Learner, Method, ResultRow,
                         SamplingStrategy, Task, WeightVector)
from core.streams import TrialSeeds, derive_seed, generator

CSV_COLUMNS = (
    "method", "j_plus", "j", "j_effective", "s_pairs", "seed",
    "rel_frob_error", "test_accuracy", "t_featurize_ms", "t_compress_ms", "t_train_ms",
)
CV_COLUMNS = ("gamma", "C", "mean_accuracy")
FLOAT_FORMAT = ".6g"

Clock = Callable[[], float]


def _zero_clock() -> float:
    return 0.0


@dataclass
class ExperimentData:
    """Training rows (compression and Frobenius target) and the held-out evaluation rows."""
    train: Dataset
    test: Optional[Dataset] = None


class _TimedSource:
    """Feature source that accumulates the time spent featurizing."""

    def __init__(self, transform: Callable[[Any], np.ndarray], clock: Clock):
        self.transform = transform
        self.clock = clock
        self.ms = 0.0

    def __call__(self, X) -> np.ndarray:
        start = self.clock()
        Z = self.transform(X)
        self.ms += (self.clock() - start) * 1000.0
        return Z


def updated_config(config: ExperimentConfig, **changes) -> ExperimentConfig:
    """Copy of `config` with `changes` applied and re-validated."""
    try:
        return ExperimentConfig.model_validate({**config.model_dump(), **changes})
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e


def load_datasets(config: ExperimentConfig, train: Optional[Dataset] = None,
                  test: Optional[Dataset] = None) -> ExperimentData:
    """
    Resolve the training/test data from arguments or configured paths.

    Classification without a test set uses a seeded holdout of the training rows.
    """
    if train is None:
        if not config.train:
            raise ConfigError("no training data: set 'train' (--train)")
        train = load_libsvm(config.train, config.dim)
    elif config.dim:
        train = train.with_dim(config.dim)
    if test is None and config.test:
        test = load_libsvm(config.test, config.dim)

    if test is not None and test.dim != train.dim:
        dim = max(train.dim, test.dim)
        logger.warning(f"Harness: train/test dims differ ({train.dim} vs {test.dim}), padding both to {dim}")
        train, test = train.with_dim(dim), test.with_dim(dim)

    if config.task != Task.FROBENIUS:
        if test is None:
            rng = generator(derive_seed(config.base_seed, "holdout"))
            train, test = split_holdout(train, config.test_fraction, rng)
            logger.info(f"Harness: no test set, holding out {test.n_rows} of {train.n_rows + test.n_rows} rows")
        if train.labels is None or test.labels is None:
            raise ConfigError("classification needs labelled train and test data")
    return ExperimentData(train=train, test=test)


def _draw(config: ExperimentConfig, seeds: TrialSeeds, n_features: int, dim: int,
          kernel: Optional[KernelSpec] = None) -> FeatureMapParams:
    strategy = SamplingStrategy(kind=config.sampling, seed=seeds.frequencies, scramble=config.scramble)
    return FeatureMapParams.draw(kernel or config.kernel, strategy, n_features, dim)


def _classify(config: ExperimentConfig, data: ExperimentData, source: _TimedSource, seeds: TrialSeeds,
              clock: Clock) -> Tuple[float, float]:
    Z_train = source(data.train.to_csr())
    Z_test = source(data.test.to_csr())
    start = clock()
    if config.learner == Learner.RIDGE:
        model = RidgeClassifier(config.ridge_lambda).fit(Z_train, data.train.labels)
        t_train = (clock() - start) * 1000.0
        predicted = model.predict(Z_test)
    else:
        model = svm_fit(Z_train, data.train.labels, C=config.svm_c, tol=config.svm_tol,
                        seed=seeds.svm, max_sweeps=config.svm_max_sweeps)
        t_train = (clock() - start) * 1000.0
        predicted = svm_predict(model, Z_test)
    return accuracy(predicted, data.test.labels), t_train


def _evaluate(config: ExperimentConfig, data: ExperimentData, seeds: TrialSeeds, method: Method,
              s_pairs: int, fitted: Dict[int, FittedMap], draw_ms: float, clock: Clock) -> List[ResultRow]:
    rows = []
    for j, fm in sorted(fitted.items()):
        source = _TimedSource(fm.transform, clock)
        rel_frob = None
        test_accuracy = None
        t_train = 0.0
        if config.task in (Task.FROBENIUS, Task.BOTH):
            m = min(config.frob_m, data.train.n_rows)
            rel_frob = estimate_frobenius_error(data.train, source, config.kernel, m, seeds.frobenius).relative_error
        if config.task in (Task.CLASSIFY, Task.BOTH):
            test_accuracy, t_train = _classify(config, data, source, seeds, clock)
        rows.append(ResultRow(
            method=method, j_plus=fm.j_plus, j=j, j_effective=fm.j_effective, s_pairs=s_pairs,
            seed=seeds.trial, rel_frob_error=rel_frob, test_accuracy=test_accuracy,
            t_featurize_ms=draw_ms + source.ms, t_compress_ms=fm.t_compress_ms, t_train_ms=t_train,
        ))
    return rows


def _run_trial(config: ExperimentConfig, data: ExperimentData, methods: Sequence[Method],
               s_values: Sequence[int], trial: int, clock: Clock) -> List[ResultRow]:
    seeds = TrialSeeds.for_trial(config.base_seed + trial)
    # plain RFM alone only needs the first max(J) frequencies of the draw
    n_draw = config.j_plus if any(m != Method.RFM for m in methods) else max(config.j)
    start = clock()
    params = _draw(config, seeds, n_draw, data.train.dim)
    draw_ms = (clock() - start) * 1000.0

    rows: List[ResultRow] = []
    for method in methods:
        if method.is_coreset:
            for s in s_values:
                fitted = build_method(config, method, clock, s_pairs=s).fit(data.train, params, seeds, config.j)
                rows.extend(_evaluate(config, data, seeds, method, s, fitted, draw_ms, clock))
        else:
            # S does not enter these methods: evaluate once, report at every S
            fitted = build_method(config, method, clock).fit(data.train, params, seeds, config.j)
            base = _evaluate(config, data, seeds, method, s_values[0], fitted, draw_ms, clock)
            for s in s_values:
                rows.extend(row.model_copy(update={'s_pairs': s}) for row in base)
    logger.debug(f"Harness: trial {trial} (seed {seeds.trial}) produced {len(rows)} rows")
    return rows


def run_experiment(config: ExperimentConfig, train: Optional[Dataset] = None, test: Optional[Dataset] = None,
                   methods: Optional[Iterable[Method]] = None,
                   s_values: Optional[Iterable[int]] = None) -> List[ResultRow]:
    """
    Run `config.trials` trials and return one row per (method, S, J, trial),
    sorted by (method, J, S, seed).

    Args:
        config: Validated experiment configuration.
        train, test: In-memory datasets; default to the configured paths.
        methods: Methods sharing each trial's draw (default: config.method).
        s_values: Pair-sample sizes (default: [config.s_pairs]).
    """
    data = load_datasets(config, train, test)
    methods = list(methods or [config.method])
    s_values = list(s_values or [config.s_pairs])
    if any(s < 1 for s in s_values):
        raise ConfigError(f"S values must be positive, got {s_values}")
    if config.task != Task.CLASSIFY and config.frob_m > data.train.n_rows:
        logger.warning(f"Harness: frob_m={config.frob_m} exceeds N={data.train.n_rows}, sampling all rows")

    clock = time.perf_counter if config.timings else _zero_clock
    logger.info(
        f"Harness: {config.trials} trial(s), methods={[m.value for m in methods]}, J={config.j}, "
        f"J+={config.j_plus}, S={s_values}, N={data.train.n_rows}, task={config.task.value}"
    )
    per_trial = Parallel(n_jobs=config.n_jobs, prefer="threads")(
        delayed(_run_trial)(config, data, methods, s_values, t, clock) for t in range(config.trials)
    )
    rows = sorted((row for trial_rows in per_trial for row in trial_rows), key=ResultRow.sort_key)
    logger.info(f"Harness: finished with {len(rows)} rows")
    return rows


def sweep_s(config: ExperimentConfig, s_values: Iterable[int], train: Optional[Dataset] = None,
            test: Optional[Dataset] = None) -> List[ResultRow]:
    """Rerun compression at each S, reusing each trial's feature draw."""
    s_values = sorted(set(s_values))
    if not s_values:
        raise ConfigError("sweep-s needs at least one S value")
    if not config.method.is_coreset:
        logger.warning(f"Harness: S does not affect method {config.method.value}; rows repeat per S")
    return run_experiment(config, train, test, s_values=s_values)


def sweep_j(config: ExperimentConfig, j_values: Iterable[int], train: Optional[Dataset] = None,
            test: Optional[Dataset] = None) -> List[ResultRow]:
    """Rows for several J from a single solver run per trial."""
    j_values = sorted(set(j_values))
    if not j_values:
        raise ConfigError("sweep-j needs at least one J value")
    return run_experiment(updated_config(config, j=j_values), train, test)


def cross_validate(config: ExperimentConfig, train: Optional[Dataset] = None) -> List[CvResult]:
    """
    Grid search over (gamma, C) with k-fold cross-validation on a subsample,
    using max(J) plain random Fourier features and the linear SVM.
    """
    if train is None:
        if not config.train:
            raise ConfigError("no training data: set 'train' (--train)")
        train = load_libsvm(config.train, config.dim)
    if train.labels is None:
        raise ConfigError("cross-validation needs labelled data")

    rng = generator(derive_seed(config.base_seed, "cv"))
    n = min(config.cv_subsample, train.n_rows)
    if n < config.cv_folds:
        raise ConfigError(f"cannot split {n} rows into {config.cv_folds} folds")
    sub = train.subset(np.sort(rng.choice(train.n_rows, size=n, replace=False)))
    folds = np.array_split(rng.permutation(n), config.cv_folds)
    labels = sub.labels
    seeds = TrialSeeds.for_trial(derive_seed(config.base_seed, "cv-trial"))
    n_features = max(config.j)
    logger.info(f"Harness: cross-validating {len(config.cv_gammas)}x{len(config.cv_cs)} grid, "
                f"{config.cv_folds} folds on {n} rows, J={n_features}")

    results = []
    for gamma in config.cv_gammas:
        spec = KernelSpec(family=config.kernel.family, gamma=gamma)
        Z = featurize(_draw(config, seeds, n_features, sub.dim, kernel=spec), sub.to_csr())
        for C in config.cv_cs:
            scores = []
            for k, fold in enumerate(folds):
                mask = np.ones(n, dtype=bool)
                mask[fold] = False
                model = svm_fit(Z[mask], labels[mask], C=C, tol=config.svm_tol,
                                seed=derive_seed(seeds.svm, f"fold-{k}"), max_sweeps=config.svm_max_sweeps)
                scores.append(accuracy(svm_predict(model, Z[fold]), labels[fold]))
            result = CvResult(gamma=gamma, C=C, mean_accuracy=float(np.mean(scores)))
            logger.info(f"Harness: gamma={gamma:g} C={C:g} accuracy={result.mean_accuracy:.4f}")
            results.append(result)

    best = max(results, key=lambda r: r.mean_accuracy)
    logger.info(f"Harness: best gamma={best.gamma:g} C={best.C:g} ({best.mean_accuracy:.4f})")
    return results


def compress(config: ExperimentConfig, train: Optional[Dataset] = None) -> CompressedMap:
    """
    Compressed feature map with max(J) features from the first trial's draw.

    Plain RFM exports its J fresh features with unit weights; RFM-JL has no
    sparse form and is rejected.
    """
    if config.method == Method.RFM_JL:
        raise ConfigError("rfm-jl produces a dense projection, not a compressed map")
    data = load_datasets(config.model_copy(update={'task': Task.FROBENIUS}), train)
    seeds = TrialSeeds.for_trial(config.base_seed)
    j = max(config.j)

    if config.method == Method.RFM:
        fresh = _draw(config, seeds, j, data.train.dim)
        return compress_map(fresh, WeightVector.ones(j))

    params = _draw(config, seeds, config.j_plus, data.train.dim)
    fitted = build_method(config).fit(data.train, params, seeds, [j])[j]
    logger.info(f"Harness: compressed {config.j_plus} features to {fitted.j_effective} with {config.method.value}")
    return compress_map(params, fitted.weights)


def _format_value(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def _emit(records: Iterable[BaseModel], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow([_format_value(getattr(record, c)) for c in columns])
    return buf.getvalue()


def emit_csv(rows: Iterable[ResultRow]) -> str:
    """CSV text: header plus one line per row, 6 significant digits, empty absent metrics."""
    return _emit(rows, CSV_COLUMNS)


def emit_cv_csv(results: Iterable[CvResult]) -> str:
    return _emit(results, CV_COLUMNS)


def write_csv(text: str, path: Optional[Union[str, Path]] = None) -> None:
    """Write CSV text to `path`, or to stdout when no path is given."""
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, 'w', newline='') as f:
            f.write(text)
    except OSError as e:
        logger.error(f"Harness: cannot write {path}: {e}")
        raise DatasetIOError(f"cannot write '{path}': {e}") from e
    logger.info(f"Harness: wrote {path}")
