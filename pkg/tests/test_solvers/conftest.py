import numpy as np
import pytest

from core.coreset import CoresetProblem
from core.streams import generator

from .problems import random_problem


@pytest.fixture
def instances():
    """50 random problems with J+ <= 200 and S <= 500."""
    rng = generator(2024)
    return [random_problem(seed, int(rng.integers(20, 201)), int(rng.integers(50, 501))) for seed in range(50)]


@pytest.fixture
def duplicate_rows():
    row = generator(3).normal(size=30)
    return CoresetProblem(np.vstack([row, row]))
