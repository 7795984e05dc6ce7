import numpy as np
import pytest

from schubart import problems as pr


@pytest.fixture(scope="session")
def pyr2():
    return pr.pyramidal(2)


@pytest.fixture(scope="session")
def pyr3():
    return pr.pyramidal(3)


@pytest.fixture(scope="session")
def spa3():
    return pr.spatial(3)


@pytest.fixture(scope="session")
def pla3():
    return pr.planar(3)


@pytest.fixture(scope="session")
def pla10():
    return pr.planar(10)


@pytest.fixture(scope="session")
def all_problems(pyr2, pyr3, spa3, pla3, pla10):
    return [pyr2, pyr3, spa3, pla3, pla10]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260816)
