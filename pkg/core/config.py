"""
Configuration Module.

Experiment settings come from three layers, later layers winning:
module DEFAULTS < a flat key=value config file < command line flags.
The merged values are validated into an `ExperimentConfig`.
"""
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from loguru import logger
from pydantic import ValidationError

from core.errors import ConfigError, DatasetIOError
from core.models import ExperimentConfig

DEFAULTS: Dict[str, Any] = {
    "kernel": "rbf",
    "gamma": 1.0,
    "method": "rfm-giga",
    "sampling": "mc",
    "scramble": False,
    "j_plus": 5000,
    "j": "100",
    "s_pairs": 20000,
    "trials": 1,
    "base_seed": 0,
    "task": "frobenius",
    "learner": "svm",
    "svm_c": 1.0,
    "svm_tol": 0.1,
    "svm_max_sweeps": 1000,
    "ridge_lambda": 1.0,
    "frob_m": 10000,
    "test_fraction": 0.2,
    "batch_size": 4096,
    "n_jobs": 1,
    "timings": True,
    "cv_gammas": "0.1,1,10",
    "cv_cs": "0.1,1,10",
    "cv_folds": 5,
    "cv_subsample": 10000,
}

# Accepted spellings that map onto the canonical keys above.
ALIASES = {
    "jplus": "j_plus",
    "s": "s_pairs",
    "seed": "base_seed",
    "C": "svm_c",
    "c": "svm_c",
    "lambda": "ridge_lambda",
    "m": "frob_m",
}

PATH_KEYS = ("train", "test", "out", "dim")
LIST_KEYS = ("j", "cv_gammas", "cv_cs")


def canonical_key(key: str) -> str:
    key = key.strip().replace('-', '_')
    return ALIASES.get(key, key)


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read a flat key=value file. Blank lines and lines starting with '#' are
    ignored; unknown keys are reported and skipped.

    Raises:
        DatasetIOError: If the file cannot be read.
        ConfigError: If a line has no '='.
    """
    try:
        with open(path, 'r') as f:
            lines = f.readlines()
    except OSError as e:
        logger.error(f"Config: cannot read {path}: {e}")
        raise DatasetIOError(f"cannot read config file '{path}': {e}") from e

    values: Dict[str, str] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        if '=' not in line:
            raise ConfigError(f"{path}:{number}: expected key=value, got '{line}'")
        key, value = line.split('=', 1)
        key = canonical_key(key)
        if key not in DEFAULTS and key not in PATH_KEYS:
            logger.warning(f"Config: ignoring unknown key '{key}' in {path}:{number}")
            continue
        values[key] = value.strip()
    logger.info(f"Config: loaded {len(values)} settings from {path}")
    return values


def _as_list(value: Any):
    if isinstance(value, str):
        return [item.strip() for item in value.split(',') if item.strip()]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def build_config(file_values: Optional[Mapping[str, Any]] = None,
                 overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """
    Merge defaults, file values and overrides (None overrides are skipped).

    Raises:
        ConfigError: If the merged settings do not validate.
    """
    merged: Dict[str, Any] = dict(DEFAULTS)
    for layer in (file_values or {}, overrides or {}):
        for key, value in layer.items():
            if value is not None:
                merged[canonical_key(key)] = value

    for key in LIST_KEYS:
        merged[key] = _as_list(merged[key])
    for key in PATH_KEYS:
        if merged.get(key) == '':
            merged[key] = None

    fields = {k: v for k, v in merged.items() if k not in ('kernel', 'gamma')}
    fields['kernel'] = {'family': merged['kernel'], 'gamma': merged['gamma']}
    try:
        return ExperimentConfig.model_validate(fields)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e
