"""
Feature Methods Module.

Strategies that turn one trial's frequency draw into feature maps with (at most)
J features each:
- PlainRfm: the first J frequencies of the draw, i.e. J fresh features.
- RfmJl: all J+ features, then a Gaussian projection down to J.
- CoresetMethod: Frank-Wolfe or GIGA compression of the J+ features.
"""
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Optional

import numpy as np
from loguru import logger

from core.coreset import build_problem, sample_pairs
from core.data import Dataset
from core.features import FeatureMapParams, JLProjector, compress_map, featurize
from core.models import ExperimentConfig, Method, WeightVector
from core.solvers.abstract import AbstractCoresetSolver
from core.solvers.frank_wolfe import FrankWolfeSolver
from core.solvers.giga import GigaSolver
from core.streams import TrialSeeds

Clock = Callable[[], float]


@dataclass
class FittedMap:
    """A feature map ready to transform data, plus what it cost to build."""
    j: int
    j_plus: int
    j_effective: int
    transform: Callable[[object], np.ndarray]
    t_compress_ms: float = 0.0
    weights: Optional[WeightVector] = None


def get_solver(name: str) -> AbstractCoresetSolver:
    """Solver registry: 'fw' / 'frank-wolfe' or 'giga'."""
    key = name.lower()
    if key in ('fw', 'frank-wolfe', 'frankwolfe', Method.RFM_FW.value):
        return FrankWolfeSolver()
    if key in ('giga', Method.RFM_GIGA.value):
        return GigaSolver()
    raise ValueError(f"Unknown solver: {name}")


class FeatureMethod(ABC):
    """
    Strategy Interface for the compared feature methods.
    """
    method: Method

    def __init__(self, config: ExperimentConfig, clock: Clock = time.perf_counter):
        self.config = config
        self.clock = clock

    def elapsed_ms(self, start: float) -> float:
        return (self.clock() - start) * 1000.0

    @abstractmethod
    def fit(self, train: Dataset, params: FeatureMapParams, seeds: TrialSeeds,
            j_values: Iterable[int]) -> Dict[int, FittedMap]:
        """Build one feature map per requested J from the trial's J+ draw."""
        pass


class PlainRfm(FeatureMethod):
    method = Method.RFM

    def fit(self, train, params, seeds, j_values):
        maps = {}
        for j in sorted(set(j_values)):
            fresh = params.restrict(np.arange(j))
            maps[j] = FittedMap(j=j, j_plus=j, j_effective=j,
                                transform=lambda X, fresh=fresh: featurize(fresh, X))
        return maps


class RfmJl(FeatureMethod):
    method = Method.RFM_JL

    def fit(self, train, params, seeds, j_values):
        maps = {}
        for j in sorted(set(j_values)):
            start = self.clock()
            projector = JLProjector(params, j, seeds.jl, batch_rows=self.config.batch_size)
            maps[j] = FittedMap(j=j, j_plus=params.j_plus, j_effective=j,
                                transform=projector.transform, t_compress_ms=self.elapsed_ms(start))
        return maps


class CoresetMethod(FeatureMethod):
    """Compress the J+ features with a greedy coreset solver; one solver run covers every J."""

    def __init__(self, config: ExperimentConfig, clock: Clock = time.perf_counter,
                 s_pairs: Optional[int] = None):
        super().__init__(config, clock)
        self.method = config.method if config.method.is_coreset else Method.RFM_GIGA
        self.solver = get_solver(self.method.value)
        self.s_pairs = s_pairs if s_pairs is not None else config.s_pairs

    def fit(self, train, params, seeds, j_values):
        wanted = sorted(set(j_values))
        start = self.clock()
        ps = sample_pairs(train.n_rows, self.s_pairs, seeds.pairs)
        problem = build_problem(train, params, ps)

        elapsed: Dict[int, float] = {}

        def record_time(iteration: int, total: int) -> None:
            elapsed[iteration] = self.elapsed_ms(start)

        path = self.solver.solve_path(problem, wanted, progress_callback=record_time)

        maps = {}
        for j in wanted:
            state = path[j]
            t_ms = elapsed[state.iteration]
            weights = state.to_weight_vector()
            cm = compress_map(params, weights)
            maps[j] = FittedMap(j=j, j_plus=params.j_plus, j_effective=weights.support_size,
                                transform=cm.transform, t_compress_ms=t_ms, weights=weights)
        logger.debug(
            f"Methods: {self.method.value} S={self.s_pairs} supports "
            f"{[maps[j].j_effective for j in wanted]} for J={wanted}"
        )
        return maps


def build_method(config: ExperimentConfig, method: Optional[Method] = None, clock: Clock = time.perf_counter,
                 s_pairs: Optional[int] = None) -> FeatureMethod:
    """Instantiate the strategy for `method` (default: the configured one)."""
    method = method or config.method
    if method == Method.RFM:
        return PlainRfm(config, clock)
    if method == Method.RFM_JL:
        return RfmJl(config, clock)
    if method.is_coreset:
        return CoresetMethod(config.model_copy(update={'method': method}), clock, s_pairs=s_pairs)
    raise ValueError(f"Unknown method: {method}")
