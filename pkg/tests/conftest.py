import pytest

from aptomit.params import apply_overrides, load_preset
from aptomit.spectrum import ep_speed


@pytest.fixture(scope="session")
def micro():
    return load_preset("microsphere-nanostring")


@pytest.fixture(scope="session")
def sphere():
    return load_preset("spinning-sphere")


@pytest.fixture(scope="session")
def w_ep(micro):
    return ep_speed(micro)


@pytest.fixture(scope="session")
def bare(micro):
    """Bare-cavity limit: no backscattering, no optomechanical coupling."""
    return apply_overrides(micro, {"kappa": 0.0, "g_om": 0.0})


@pytest.fixture(scope="session")
def passive(micro):
    """Variant with kappa < gamma_c, i.e. no gain-like supermode."""
    return apply_overrides(micro, {"kappa": 500.0})
