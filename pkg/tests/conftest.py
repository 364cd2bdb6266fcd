import numpy as np
import pytest

from corrseg import SeriesPair


def correlated_pair(rho: float, T: int, rng: np.random.Generator, mean=(0.0, 0.0)) -> SeriesPair:
    """iid bivariate normal observations with the given correlation."""
    z = rng.standard_normal((T, 2))
    x = z[:, 0] + mean[0]
    y = rho * z[:, 0] + np.sqrt(1.0 - rho * rho) * z[:, 1] + mean[1]
    return SeriesPair(x, y)


@pytest.fixture
def rng():
    return np.random.default_rng(20240612)
