import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bergnum.weights import power_weight, std_weight, unit_weight


@pytest.fixture(scope="session")
def one():
    return unit_weight()


@pytest.fixture(scope="session")
def std1():
    return std_weight(1.0)


@pytest.fixture(scope="session")
def linear():
    return power_weight(1.0)


@pytest.fixture()
def rng():
    # function-scoped: each test draws the same sequence regardless of the
    # order the suite runs in
    return np.random.default_rng(20240)
