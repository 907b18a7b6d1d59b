import math

import numpy as np
import pytest

from paretotail import Sample


@pytest.fixture
def three_points() -> Sample:
    """The worked micro-sample {e^2, e, 1}."""
    return Sample([math.e**2, math.e, 1.0])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def random_positive_sample(rng, n_max: int = 50) -> Sample:
    n = int(rng.integers(3, n_max + 1))
    return Sample(np.exp(rng.normal(0.0, 1.5, n)))
