import numpy as np
import pytest

from tensor_bundle import base
from tensor_bundle.frames import FiberPoint
from tensor_bundle.sasaki import RescaleFunction


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def sphere():
    return base.sphere(1.0)


@pytest.fixture(scope="session")
def plane():
    return base.euclidean(2)


def rescale(source, n=2):
    return RescaleFunction.parse(source, n)


def random_point(chart, rng, p=1, q=1, scale=0.5, margin=0.1):
    box = np.array(chart.box)
    width = box[:, 1] - box[:, 0]
    x = box[:, 0] + margin * width + (1 - 2 * margin) * width * rng.random(chart.n)
    return FiberPoint(x, scale * rng.normal(size=chart.n ** (p + q)), p, q)
