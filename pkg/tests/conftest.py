import math

import numpy as np
import pytest

from eucone.problems import FiniteProblem


@pytest.fixture
def four_point():
    # three unit corners plus their sum
    return FiniteProblem(
        ["e1", "e2", "e3", "ones"],
        [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]],
    )


@pytest.fixture
def singleton():
    return FiniteProblem(["only"], [[0.3, -0.2, 0.7]])


def axis(n):
    return np.ones(n) / math.sqrt(n)
