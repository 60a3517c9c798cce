import math

import numpy as np
import pytest

from src.core.interpolation import InterpProblem
from src.core.solver import SolverConfig
from src.core.spaces import Couple, NormedSpace
from src.core.structures import Lp


@pytest.fixture
def fast_solver():
    return SolverConfig(rel_tol=1e-6, max_iters=5000, restarts=1, seed=3)


@pytest.fixture
def hilbert_problem(fast_solver):
    couple = Couple.of(NormedSpace.weighted_lp(2, [1.0, 2.0]), NormedSpace.weighted_lp(2, [3.0, 0.5]))
    return InterpProblem(couple, Lp(2), Lp(2), 0.5, math.e, 4, fast_solver)


@pytest.fixture
def x2():
    return np.array([1.0 + 0.5j, -0.75])
