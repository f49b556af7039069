import pytest

from bayesline import DataPoint, Dataset, default_model
from bayesline.sampler import SamplerConfig, sample_hmc

# the three widely quoted points of the ten-word dataset
WORDS3 = Dataset(
    (
        DataPoint("machine", 132.0, 7.0),
        DataPoint("people", 139.0, 6.0),
        DataPoint("probability", 331.0, 8.0),
    )
)


@pytest.fixture
def words3() -> Dataset:
    return WORDS3


@pytest.fixture
def model():
    return default_model()


@pytest.fixture(scope="session")
def chains16k():
    """One full-size HMC run (4 x 4000) shared by the slower tests."""
    cfg = SamplerConfig(seed=1)
    return sample_hmc(default_model(), WORDS3, cfg)
