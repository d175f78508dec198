import numpy as np
import pytest

from krein_string import StringSpec


def random_spec(rng: np.random.Generator, n_segments: int, lo=0.1, hi=2.0) -> StringSpec:
    return StringSpec(
        lengths=rng.uniform(lo, hi, n_segments),
        masses=rng.uniform(lo, hi, n_segments - 1),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
