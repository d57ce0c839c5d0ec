import numpy as np
import pytest

import trap_tail as tt


@pytest.fixture(scope="session")
def params_half() -> tt.ModelParams:
    """alpha = 1/2, beta = 2: the rho = 1 reference point."""
    return tt.make_params(0.5, 2.0)


@pytest.fixture(scope="session")
def params_quarter() -> tt.ModelParams:
    """alpha = 1/4, beta = 2: rho = 2, finite mean."""
    return tt.make_params(0.25, 2.0)


@pytest.fixture(scope="session")
def small_batch(params_half) -> tt.ExcursionBatch:
    return tt.sample_excursions(
        params_half, tt.SimConfig(n_samples=200_000, seed=7, workers=2))


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
