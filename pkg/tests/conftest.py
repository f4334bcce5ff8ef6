import numpy as np
import pytest

from dmasim.netmodel import PhysicalConstants


@pytest.fixture
def consts():
    return PhysicalConstants()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
