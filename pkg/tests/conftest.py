import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from perisolve import DelayKernel, DelaySpec, ProblemSpec, TrigPolynomial  # noqa: E402


@pytest.fixture
def damped():
    """x' = -x + f."""
    return ProblemSpec(1, [[-1.0]])


@pytest.fixture
def delayed():
    """x'(t) = -x(t - pi) + f."""
    return ProblemSpec(1, [[0.0]], DelaySpec(1, 1, [(math.pi, [[-1.0]])]))


@pytest.fixture
def cosine():
    return TrigPolynomial(1, {1: [0.5], -1: [0.5]})


def two_dim_kernel_problem(grid_count=65):
    """Second-order, two-component problem with real A, one discrete lag and a cosine kernel."""
    A = np.array([[-2.0, 0.5], [0.3, -3.0]])
    kernel = DelayKernel.from_function(
        lambda th: 0.2 * np.cos(th) * np.array([[1.0, 0.0], [0.5, 1.0]]), grid_count, 1)
    delay = DelaySpec(2, 1, [(math.pi / 2, 0.4 * np.eye(2))], kernel)
    return ProblemSpec(2, A, delay)


def two_dim_forcing():
    return TrigPolynomial(2, {1: [0.5, 0.0], -1: [0.5, 0.0], 2: [0.0, -0.5j], -2: [0.0, 0.5j]})
