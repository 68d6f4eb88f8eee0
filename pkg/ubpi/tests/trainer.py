from pydantic import ValidationError

from ubpi import metrics
from ubpi.data.standardize import Standardizer
from ubpi.data.toy import toy_wave
from ubpi.errors import InvalidArgumentError
from ubpi.errors.internal import InternalError
from ubpi.errors.numeric import DivergenceError, DomainError
from ubpi.models.network import init_network, predict
from ubpi.schemas.loss import LossConfig, LossKind
from ubpi.schemas.train import OptimizerKind, TrainConfig
from ubpi.trainer import (
    gradients,
    load_train_config,
    target_range,
    to_key_value,
    trace_csv,
    train,
)
from ubpi.trainer.optimizers import SGD, Adam, clip_gradients, make_optimizer

import numpy as np
import pickle
import pytest


def test_config_preconditions():
    with pytest.raises(ValidationError):
        TrainConfig(epochs=0)

    with pytest.raises(ValidationError):
        TrainConfig(learning_rate=0.0)

    with pytest.raises(ValidationError):
        LossConfig(pc=1.0)

    with pytest.raises(ValidationError):
        LossConfig(lambda_=-1.0)


def test_training_is_deterministic(small_batch, quick_config):
    params = init_network(small_batch.d, quick_config.hidden, 0)

    first, first_trace = train(params, small_batch, quick_config)
    second, second_trace = train(params, small_batch, quick_config)

    assert first.equals(second)
    assert first_trace == second_trace
    assert not first.equals(params)


def test_train_does_not_touch_its_input(small_batch, quick_config):
    params = init_network(small_batch.d, quick_config.hidden, 0)
    before = params.copy()

    train(params, small_batch, quick_config)

    assert params.equals(before)


def test_uncertainty_term_alone_reduces_the_error():
    data = toy_wave(60, seed=0)
    batch = Standardizer.fit(data).apply(data)
    config = TrainConfig(
        epochs=40,
        batch_size=20,
        hidden=16,
        learning_rate=1e-2,
        loss=LossConfig(lambda_=0.0),
    )
    params = init_network(1, config.hidden, 0)

    trained, trace = train(params, batch, config)

    def error(p) -> float:
        return metrics.mse_midpoint(predict(p, batch.features), batch.targets)

    assert error(trained) < error(params)
    assert len(trace.records) == 40


def test_trace_records_every_epoch(small_batch, quick_config):
    params = init_network(small_batch.d, quick_config.hidden, 1)
    _, trace = train(params, small_batch, quick_config)

    assert [r.epoch for r in trace.records] == list(range(1, 21))
    assert 0.0 <= trace.initial_crossing_rate <= 1.0

    lines = trace_csv(trace).splitlines()
    assert lines[0].split(",") == trace.columns()
    assert len(lines) == 21


def test_batch_size_larger_than_the_data(small_batch):
    config = TrainConfig(batch_size=41, epochs=1, hidden=4)

    with pytest.raises(InvalidArgumentError, match="--batch"):
        train(init_network(small_batch.d, 4, 0), small_batch, config)


def test_feature_dimension_mismatch(small_batch, quick_config):
    with pytest.raises(InvalidArgumentError):
        train(init_network(3, 8, 0), small_batch, quick_config)


@pytest.mark.parametrize("kind", list(LossKind))
@pytest.mark.parametrize("optimizer", list(OptimizerKind))
def test_every_loss_and_optimizer_trains(small_batch, kind, optimizer):
    config = TrainConfig(
        loss_kind=kind,
        optimizer=optimizer,
        epochs=3,
        batch_size=20,
        hidden=6,
    )
    trained, trace = train(init_network(2, 6, 0), small_batch, config)

    assert trained.is_finite()
    assert len(trace.records) == 3


def test_domain_errors_become_divergence(
    small_batch, quick_config, monkeypatch
):
    def broken(*args, **kwargs):
        raise DomainError("log: non-positive input")

    monkeypatch.setattr("ubpi.trainer.gradients", broken)

    with pytest.raises(DivergenceError) as info:
        train(init_network(2, 8, 0), small_batch, quick_config, member=3)

    assert (info.value.epoch, info.value.step, info.value.member) == (1, 1, 3)
    assert "member 3, epoch 1, step 1" in info.value.message


def test_divergence_error_pickles():
    error = pickle.loads(pickle.dumps(DivergenceError(4, 2, 1, "boom")))

    assert error.message == (
        "training diverged at member 1, epoch 4, step 2: boom"
    )


def test_gradient_step_matches_first_order_prediction(small_batch):
    config = TrainConfig(hidden=8, loss=LossConfig(soften=5.0))
    params = init_network(2, 8, 2)
    breakdown, grads = gradients(params, small_batch, config)

    eta = 1e-6
    stepped = params.copy()
    SGD(eta).step(stepped.as_dict(), grads)
    after, _ = gradients(stepped, small_batch, config)

    squared_norm = sum(float(np.sum(g * g)) for g in grads.values())
    predicted = -eta * squared_norm

    assert after.total - breakdown.total == pytest.approx(predicted, rel=1e-2)


def test_target_range(small_batch):
    assert target_range(small_batch) == pytest.approx(
        float(np.ptp(small_batch.targets))
    )


def test_clip_gradients_preserves_direction():
    grads = {"a": np.array([3.0, 0.0]), "b": np.array([4.0])}
    clipped = clip_gradients(grads, 1.0)

    np.testing.assert_allclose(clipped["a"], [0.6, 0.0])
    np.testing.assert_allclose(clipped["b"], [0.8])
    assert clip_gradients(grads, 10.0) is grads


def test_adam_minimizes_a_quadratic():
    params = {"x": np.array([5.0, -3.0])}
    adam = Adam(lr=0.1)

    for _ in range(500):
        adam.step(params, {"x": 2.0 * params["x"]})

    np.testing.assert_allclose(params["x"], [0.0, 0.0], atol=5e-2)


def test_config_file_round_trip(tmp_path):
    config = TrainConfig(
        loss_kind=LossKind.LUBE,
        epochs=12,
        learning_rate=0.003,
        optimizer=OptimizerKind.SGD,
        loss=LossConfig(pc=0.9, lambda_=42.5, soften=80.0),
    )
    path = tmp_path / "experiment.env"
    path.write_text(to_key_value(config))

    assert load_train_config(path) == config


def test_config_file_asset(assets):
    config = load_train_config(assets / "experiment.env")

    assert config.epochs == 5
    assert config.batch_size == 20
    assert config.hidden == 8
    assert config.loss.lambda_ == 30.0
    assert config.loss.confidence_level == 0.9
    assert config.loss_kind == LossKind.UBPI


def test_config_file_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.env"
    path.write_text("epochs=3\nmomentum=0.9\n")

    with pytest.raises(InvalidArgumentError, match="momentum"):
        load_train_config(path)


def test_config_file_keeps_the_base_for_absent_keys(tmp_path):
    path = tmp_path / "short.env"
    path.write_text("epochs=5\nlambda=40\n")
    base = TrainConfig(hidden=100, loss=LossConfig(pc=0.9))

    config = load_train_config(path, base)

    assert config.epochs == 5
    assert config.hidden == 100
    assert config.loss.lambda_ == 40.0
    assert config.loss.confidence_level == 0.9


def test_unknown_optimizer_kind_is_an_internal_error():
    config = TrainConfig.model_construct(optimizer="rmsprop")

    with pytest.raises(InternalError, match="rmsprop"):
        make_optimizer(config)
