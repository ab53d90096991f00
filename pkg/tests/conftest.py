import numpy as np
import pytest

from randcomplex import BoxWindow, HyperbolicDiskWindow, constant_system


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)


@pytest.fixture
def unit_square():
    return BoxWindow(((0.0, 1.0), (0.0, 1.0)))


@pytest.fixture
def hyper_disk():
    return HyperbolicDiskWindow(1.0)


@pytest.fixture
def const23():
    return constant_system(2, (0.3, 0.5))


def combined_se(*ses):
    return float(np.sqrt(sum(s**2 for s in ses)))
