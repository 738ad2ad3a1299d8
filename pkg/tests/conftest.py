import pytest

from wavesym.eqalgebra import build_generators


@pytest.fixture(scope="session")
def derived6():
    return build_generators("derived", 6)


@pytest.fixture(scope="session")
def printed6():
    return build_generators("paper", 6)
