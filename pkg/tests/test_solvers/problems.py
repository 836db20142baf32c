import numpy as np

from core.coreset import CoresetProblem, build_problem, sample_pairs
from core.features import FeatureMapParams
from core.models import KernelSpec, SamplingStrategy
from core.streams import derive_seed, generator


def random_problem(seed: int, j_plus: int, s: int, n: int = 60, p: int = 4) -> CoresetProblem:
    """Coreset problem built from random data with an RBF feature map."""
    X = generator(derive_seed(seed, "data")).normal(size=(n, p))
    params = FeatureMapParams.draw(KernelSpec(gamma=0.5), SamplingStrategy(seed=derive_seed(seed, "omega")),
                                   j_plus, p)
    return build_problem(X, params, sample_pairs(n, s, derive_seed(seed, "pairs")))


def best_one_sparse(cp: CoresetProblem) -> float:
    """Brute-force minimum of (1/S) ||r - a R_j||^2 over j and a >= 0."""
    rr = float(cp.r @ cp.r)
    best = rr
    for j in range(cp.j_plus):
        norm_sq = float(cp.R[j] @ cp.R[j])
        if norm_sq > 0:
            proj = max(float(cp.R[j] @ cp.r), 0.0)
            best = min(best, rr - proj * proj / norm_sq)
    return best / cp.n_pairs


def log_slope(objectives) -> float:
    """Least-squares slope of log(objective) against iteration."""
    values = np.asarray([o for o in objectives if o > 0])
    iterations = np.arange(1, values.shape[0] + 1)
    return float(np.polyfit(iterations, np.log(values), 1)[0])


