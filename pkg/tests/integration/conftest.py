import os

import numpy as np
import pytest
from dotenv import load_dotenv

from dara_alloc.experiment import ExperimentConfig, HDistribution, ProfileSpec
from dara_alloc.rate_alloc import Objective

load_dotenv()


@pytest.fixture(scope='session')
def study_seed() -> int:
    return int(os.getenv('DARA_STUDY_SEED', '20240611'))


@pytest.fixture()
def rng(study_seed) -> np.random.Generator:
    return np.random.default_rng(study_seed)


@pytest.fixture(scope='session')
def homogeneous_study(study_seed) -> ExperimentConfig:
    """Identical discounting, h ~ Normal(200, 20), T = 500"""
    return ExperimentConfig(
        scenario="homogeneous",
        N=2,
        T=500,
        seed=study_seed,
        profiles=(ProfileSpec(delta=0.99),),
        objective=Objective.MAX_MIN,
        h=HDistribution(kind="normal", mean=200.0, stddev=20.0),
        policies=("dara", "rr", "rrr"),
    )


@pytest.fixture(scope='session')
def heterogeneous_study(study_seed) -> ExperimentConfig:
    """Six sensors with equally spaced discount factors, budget Rmin"""
    return ExperimentConfig(
        scenario="heterogeneous",
        N=6,
        T=500,
        seed=study_seed,
        profiles=(ProfileSpec(delta_range=(0.990, 0.992)),),
        objective=Objective.MAX_MIN,
        h=HDistribution(kind="constant", value=200.0),
        policies=("dara", "rr", "rrr", "rdrr"),
    )
