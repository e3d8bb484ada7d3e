import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dirsec.channel import SceneGeometry, generate, keyed_rng
from dirsec.secrecy import SystemConfig

# numeric property tests routinely exceed the default 200ms example
# deadline on a loaded machine; correctness is budgeted by example count
settings.register_profile(
    "dirsec", deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dirsec")


SMALL_CFG = SystemConfig(m_tx=4, n_bob=2, n_eve=2, n_streams=2, n_sub=2,
                         n_irs1=6, n_irs2=5, power_watts=1.0,
                         noise_bob_watts=1e-11, noise_eve_watts=1e-11)


@pytest.fixture(scope="session")
def small_cfg() -> SystemConfig:
    return SMALL_CFG


@pytest.fixture(scope="session")
def geometry() -> SceneGeometry:
    return SceneGeometry()


@pytest.fixture()
def small_channels(small_cfg, geometry):
    return generate(small_cfg, geometry, keyed_rng(202, "unit"))


@pytest.fixture()
def rng():
    return np.random.default_rng(9)
