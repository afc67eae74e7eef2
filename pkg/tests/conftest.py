import numpy as np
import pytest
from typer.testing import CliRunner

from app import create_app
from config import TestingConfig


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def config_class():
    return TestingConfig


@pytest.fixture
def cli():
    return create_app(TestingConfig)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def unit_vectors(rng):
    """1000 random points of the unit sphere."""
    v = rng.normal(size=(1000, 3))
    return v / np.linalg.norm(v, axis=1)[:, None]
