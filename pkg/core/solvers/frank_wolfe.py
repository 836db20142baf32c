"""
Frank-Wolfe Solver.

Greedy Frank-Wolfe on the polytope

    { w >= 0 : sum_j w_j sigma_j = sigma }

whose vertices are (sigma / sigma_j) e_j, i.e. the scaled rows (sigma / sigma_j) R_j
in reconstruction space. The first iterate is the vertex best aligned with r;
every later step moves towards the vertex best aligned with the residual, with
an exact line search. The support grows by at most one feature per iteration.
"""
from typing import Iterator

import numpy as np
from loguru import logger

from core.coreset import CoresetProblem
from core.models import WeightVector
from core.solvers.abstract import CONVERGED_SQ_NORM, AbstractCoresetSolver, SolverState


class FrankWolfeSolver(AbstractCoresetSolver):
    name = "FrankWolfe"

    def iterate(self, problem: CoresetProblem, iterations: int) -> Iterator[SolverState]:
        usable = self.check_problem(problem, iterations)
        R, r, n_pairs = problem.R, problem.r, problem.n_pairs

        inv_sigma = np.zeros(problem.j_plus)
        inv_sigma[usable] = 1.0 / problem.sigma_j[usable]
        vertex_scale = problem.sigma * inv_sigma

        def select(residual: np.ndarray) -> int:
            scores = (R @ residual) * inv_sigma
            scores[~usable] = -np.inf
            return int(np.argmax(scores))

        w = np.zeros(problem.j_plus)
        f = select(r)
        w[f] = vertex_scale[f]
        rw = problem.reconstruction(w)
        residual = r - rw
        yield SolverState(1, w.copy(), float(residual @ residual) / n_pairs)

        for it in range(2, iterations + 1):
            f = select(residual)
            vertex = vertex_scale[f] * R[f]
            direction = vertex - rw
            denom = float(direction @ direction)
            if denom < CONVERGED_SQ_NORM:
                logger.debug(f"{self.name}: converged at iteration {it - 1} (vertex equals iterate)")
                return
            step = min(max(float(direction @ residual) / denom, 0.0), 1.0)
            if step == 0.0:
                logger.debug(f"{self.name}: no descent direction at iteration {it}, stopping")
                return

            w *= 1.0 - step
            w[f] += step * vertex_scale[f]
            rw = problem.reconstruction(w)
            residual = r - rw
            obj = float(residual @ residual) / n_pairs
            logger.debug(f"{self.name}: it={it} feature={f} step={step:.4f} objective={obj:.3e}")
            yield SolverState(it, w.copy(), obj)


def frank_wolfe(cp: CoresetProblem, iterations: int) -> WeightVector:
    """Run `iterations` Frank-Wolfe steps and return the weights."""
    return FrankWolfeSolver().solve(cp, iterations)
