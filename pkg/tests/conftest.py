import pytest

from ecdlp_forge import ecc, gf2m


@pytest.fixture(scope="session")
def spec4():
    return gf2m.FieldSpec(4, 0x13)


@pytest.fixture(scope="session")
def spec5():
    return gf2m.FieldSpec(5, 0x25)


@pytest.fixture(scope="session")
def spec8():
    return gf2m.FieldSpec(8, 0x11B)


@pytest.fixture(scope="session")
def desk4(spec4):
    return ecc.find_desk_curve(spec4, min_order=5)


@pytest.fixture(scope="session")
def desk5(spec5):
    return ecc.find_desk_curve(spec5, min_order=7)
