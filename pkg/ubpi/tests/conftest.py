from pathlib import Path
from typing import Generator

from typer.testing import CliRunner

from ubpi.configuration import Configuration
from ubpi.data import Batch
from ubpi.dependencies.configuration import override_configuration
from ubpi.schemas.loss import LossConfig
from ubpi.schemas.train import TrainConfig

import numpy as np
import pytest

import tempfile


ASSETS = Path(__file__).parent / "assets"


@pytest.fixture
def configuration_fixture() -> Generator[Configuration, None, None]:
    with tempfile.TemporaryDirectory() as temp_dir:
        configuration = Configuration(temp_dir, workers=1)
        override_configuration(configuration)

        yield configuration

        override_configuration(None)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def assets() -> Path:
    return ASSETS


@pytest.fixture
def small_batch() -> Batch:
    """40 standardized-ish samples of a noisy line with 2 features."""

    rng = np.random.default_rng(3)
    x = rng.uniform(-1.0, 1.0, size=(40, 2))
    y = x[:, 0] - 0.5 * x[:, 1] + rng.normal(0.0, 0.2, 40)

    return Batch(x, (y - y.mean()) / y.std(), ("a", "b"))


@pytest.fixture
def quick_config() -> TrainConfig:
    return TrainConfig(
        epochs=20,
        batch_size=10,
        hidden=8,
        learning_rate=0.01,
        loss=LossConfig(lambda_=15.0),
    )
