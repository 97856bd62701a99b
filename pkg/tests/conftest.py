import pytest

from hyperperc import build_torus, enumerate_animals


@pytest.fixture(scope="session")
def m5n8_tally():
    return enumerate_animals(5, 8)


@pytest.fixture(scope="session")
def torus3():
    return build_torus(3)


@pytest.fixture(scope="session")
def torus4():
    return build_torus(4)


@pytest.fixture(scope="session")
def torus5():
    return build_torus(5)


@pytest.fixture(scope="session")
def torus64():
    return build_torus(64)
