"""
GIGA Solver (greedy iterative geodesic ascent).

Works on the unit sphere: l = r / ||r||, l_j = R_j / ||R_j||, and the current
direction x = sum_j u_j l_j with ||x|| = 1. Each step picks the row whose
geodesic direction from x is best aligned with the geodesic direction towards l,
then moves x along the great circle with the closed-form optimal step.
Reported weights are rescaled so that r(w) is the optimal nonnegative multiple
of x, which makes r - r(w) orthogonal to r(w).
"""
from typing import Iterator

import numpy as np
from loguru import logger

from core.coreset import CoresetProblem
from core.errors import DegenerateProblemError
from core.models import WeightVector
from core.solvers.abstract import AbstractCoresetSolver, SolverState

# 1 - <l, x>^2 below this means x already points at l.
ALIGNED_TOL = 1e-14


class GigaSolver(AbstractCoresetSolver):
    name = "GIGA"

    def iterate(self, problem: CoresetProblem, iterations: int) -> Iterator[SolverState]:
        usable = self.check_problem(problem, iterations)
        R, r, n_pairs = problem.R, problem.r, problem.n_pairs
        r_norm = float(np.linalg.norm(r))
        if r_norm <= 0.0:
            raise DegenerateProblemError("target vector r is zero")

        ell = r / r_norm
        inv_norm = np.zeros(problem.j_plus)
        inv_norm[usable] = 1.0 / problem.row_norms[usable]
        align = (R @ ell) * inv_norm  # <l, l_j>

        # x = r(u * inv_norm) is kept normalised, so r(w) = scale * x
        def state(it: int, u: np.ndarray, x: np.ndarray) -> SolverState:
            scale = max(float(r @ x), 0.0)
            residual = r - scale * x
            return SolverState(it, scale * u * inv_norm, float(residual @ residual) / n_pairs)

        u = np.zeros(problem.j_plus)
        f = int(np.argmax(np.where(usable, align, -np.inf)))
        u[f] = 1.0
        x = R[f] * inv_norm[f]
        yield state(1, u, x)

        for it in range(2, iterations + 1):
            ell_x = float(ell @ x)
            gap = 1.0 - ell_x * ell_x
            if gap <= ALIGNED_TOL:
                logger.debug(f"{self.name}: direction aligned with target at iteration {it - 1}")
                return

            proj = (R @ x) * inv_norm                      # <l_j, x>
            lateral = np.sqrt(np.maximum(1.0 - proj * proj, 0.0))
            candidates = usable & (lateral > 1e-12)
            if not candidates.any():
                logger.debug(f"{self.name}: no feature leaves the current direction, stopping")
                return
            # <l_j, d> for the unit geodesic direction d = (l - <l, x> x) / sqrt(gap)
            towards_l = (align - ell_x * proj) / np.sqrt(gap)
            scores = np.full(problem.j_plus, -np.inf)
            scores[candidates] = towards_l[candidates] / lateral[candidates]
            f = int(np.argmax(scores))

            zeta0, zeta1, zeta2 = align[f], ell_x, proj[f]
            towards = zeta0 - zeta1 * zeta2
            away = zeta1 - zeta0 * zeta2
            if towards + away <= 0.0:
                logger.debug(f"{self.name}: degenerate geodesic step at iteration {it}, stopping")
                return
            step = min(max(towards / (towards + away), 0.0), 1.0)
            if step == 0.0:
                logger.debug(f"{self.name}: no ascent towards feature {f} at iteration {it}, stopping")
                return

            u *= 1.0 - step
            u[f] += step
            x *= 1.0 - step
            x += (step * inv_norm[f]) * R[f]
            norm_x = float(np.linalg.norm(x))
            u /= norm_x
            x /= norm_x
            current = state(it, u, x)
            logger.debug(f"{self.name}: it={it} feature={f} step={step:.4f} objective={current.objective:.3e}")
            yield current


def giga(cp: CoresetProblem, iterations: int) -> WeightVector:
    """Run `iterations` GIGA steps and return the rescaled weights."""
    return GigaSolver().solve(cp, iterations)
