import pytest

from primeends import build_gallery


@pytest.fixture(scope="session")
def square64():
    return build_gallery("unit_square", 1 / 64)


@pytest.fixture(scope="session")
def square128():
    return build_gallery("unit_square", 1 / 128)


@pytest.fixture(scope="session")
def disk64():
    return build_gallery("disk", 1 / 64)


@pytest.fixture(scope="session")
def slit100():
    return build_gallery("slit_disk", 1 / 100)


@pytest.fixture(scope="session")
def comb7():
    return build_gallery("topologist_comb", 2.0 ** -7, {"depth": 5})


@pytest.fixture(scope="session")
def pins256():
    return build_gallery("shrinking_pins", 1 / 256, {"depth": 7})
