import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_rgb(rng):
    def make(height=32, width=32):
        return rng.random((height, width, 3))

    return make


@pytest.fixture
def random_gray(rng):
    def make(height=32, width=32):
        return rng.random((height, width))

    return make
