import numpy as np
import pytest

from drsteer.dataset import load_csv

from helpers import synthetic_indicators_csv


@pytest.fixture(scope="session")
def indicators_csv() -> bytes:
    return synthetic_indicators_csv()


@pytest.fixture(scope="session")
def indicators(indicators_csv):
    return load_csv(indicators_csv, id_column="country")


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
