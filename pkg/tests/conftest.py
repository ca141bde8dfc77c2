import pytest

from symspace.product import build_product
from symspace.symmetric import build_cpn_pair, build_hpn_pair, build_sphere_pair


@pytest.fixture(scope="session")
def s2():
    return build_sphere_pair(2)


@pytest.fixture(scope="session")
def s3():
    return build_sphere_pair(3)


@pytest.fixture(scope="session")
def s4():
    return build_sphere_pair(4)


@pytest.fixture(scope="session")
def cp2():
    return build_cpn_pair(2)


@pytest.fixture(scope="session")
def hp1():
    return build_hpn_pair(1)


@pytest.fixture(scope="session")
def s3s3(s3):
    return build_product(s3, s3)


@pytest.fixture(scope="session")
def s4s3(s4, s3):
    return build_product(s4, s3)


@pytest.fixture(scope="session")
def s2s2(s2):
    return build_product(s2, s2)
