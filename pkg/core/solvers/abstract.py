from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, Optional

import numpy as np
from loguru import logger

from core.coreset import CoresetProblem
from core.errors import DegenerateProblemError
from core.models import WeightVector

# Squared norms below this are treated as exact reconstruction.
CONVERGED_SQ_NORM = 1e-18


@dataclass
class SolverState:
    """Solver iterate after `iteration` greedy steps."""
    iteration: int
    weights: np.ndarray
    objective: float

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.weights))

    def to_weight_vector(self) -> WeightVector:
        return WeightVector.from_dense(self.weights)


class AbstractCoresetSolver(ABC):
    """
    Strategy Interface for greedy coreset solvers.
    Each solver (Frank-Wolfe, GIGA) must implement `iterate`.
    """
    name = "abstract"

    @abstractmethod
    def iterate(self, problem: CoresetProblem, iterations: int) -> Iterator[SolverState]:
        """
        Run at most `iterations` greedy steps, yielding the state after each one.
        The generator may stop early once the target is reconstructed.
        """
        pass

    def check_problem(self, problem: CoresetProblem, iterations: int) -> np.ndarray:
        """Validate inputs; returns the mask of usable (nonzero) rows."""
        if iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {iterations}")
        usable = problem.sigma_j > 0
        if not usable.any():
            raise DegenerateProblemError("all rows of R are zero (sigma = 0)")
        return usable

    def solve(self, problem: CoresetProblem, iterations: int,
              progress_callback: Optional[Callable[[int, int], None]] = None) -> WeightVector:
        """Run the solver and return the final weights."""
        last = None
        for state in self.iterate(problem, iterations):
            last = state
            if progress_callback:
                progress_callback(state.iteration, iterations)
        logger.info(
            f"{self.name}: {last.iteration} iterations, support {last.support_size}, "
            f"objective {last.objective:.3e}"
        )
        return last.to_weight_vector()

    def solve_path(self, problem: CoresetProblem, checkpoints: Iterable[int],
                   progress_callback: Optional[Callable[[int, int], None]] = None) -> Dict[int, SolverState]:
        """
        One run up to max(checkpoints); returns the state reached at each checkpoint.
        If the solver converges early, later checkpoints get the final state.
        """
        wanted = sorted(set(checkpoints))
        states: Dict[int, SolverState] = {}
        last = None
        for state in self.iterate(problem, wanted[-1]):
            last = state
            if progress_callback:
                progress_callback(state.iteration, wanted[-1])
            if state.iteration in wanted:
                states[state.iteration] = state
        if last is None:
            raise RuntimeError(f"{self.name} produced no iterate")
        for c in wanted:
            states.setdefault(c, last)
        return states
