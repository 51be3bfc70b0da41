import pytest

from dara_alloc import log_config
from tests.builders import exponential_rab, make_rab

log_config.load_config()


@pytest.fixture()
def rab_half():
    """Two sensors sharing delta = 0.5 over four slots"""
    return exponential_rab(0.5, 2, 4)


@pytest.fixture()
def rab_quarter():
    return make_rab([[1, 0.5, 0.25], [1, 0.5, 0.25]])
