import numpy as np
import pytest

from geosax.geometry import ManifoldDescriptor


@pytest.fixture
def sphere3():
    return ManifoldDescriptor.hypersphere(3)


@pytest.fixture
def sphere8():
    return ManifoldDescriptor.hypersphere(8)


@pytest.fixture
def grass52():
    return ManifoldDescriptor.grassmann(5, 2)


@pytest.fixture
def se3_1():
    return ManifoldDescriptor.product_se3(1)


@pytest.fixture
def eucl3():
    return ManifoldDescriptor.euclidean(3)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)
