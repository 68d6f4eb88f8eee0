"""Mini-batch training of one interval network."""

from dotenv import dotenv_values
from pathlib import Path
from pydantic import ValidationError

from numpy.typing import NDArray

from ubpi import autodiff, metrics
from ubpi.data import Batch
from ubpi.errors import InvalidArgumentError, NotFoundError
from ubpi.errors.numeric import DivergenceError, DomainError
from ubpi.losses import objective
from ubpi.models.network import (
    NetworkParams,
    forward,
    parameter_nodes,
    predict,
)
from ubpi.schemas.loss import LossBreakdown
from ubpi.schemas.train import EpochRecord, TrainConfig, TrainTrace
from ubpi.trainer.optimizers import clip_gradients, make_optimizer

import logging
import numpy as np


logger = logging.getLogger(__name__)


def target_range(batch: Batch) -> float:
    """The numerical range of the targets, used by the LUBE loss."""

    spread = float(np.ptp(batch.targets))

    return spread if spread > 0.0 else 1.0


def gradients(
    params: NetworkParams,
    batch: Batch,
    config: TrainConfig,
    spread: float = 1.0,
) -> tuple[LossBreakdown, dict[str, NDArray[np.float64]]]:
    """Build the tape for one mini-batch and differentiate the loss.

    Returns:
        The loss breakdown and the gradient of the total with respect to \
            every parameter, keyed like `NetworkParams.as_dict()`.
    """

    nodes = parameter_nodes(params)
    lower, upper = forward(nodes, batch.features)
    result = objective(
        config.loss_kind, lower, upper, batch.targets, config.loss, spread
    )
    autodiff.backward(result.total)

    return result.breakdown, {name: node.grad for name, node in nodes.items()}


def _epoch_record(
    epoch: int,
    breakdowns: list[LossBreakdown],
    params: NetworkParams,
    train: Batch,
) -> EpochRecord:
    intervals = predict(params, train.features)

    def average(field: str) -> float:
        return float(np.mean([getattr(b, field) for b in breakdowns]))

    return EpochRecord(
        epoch=epoch,
        total=average("total"),
        l_ue=average("l_ue"),
        l_pi=average("l_pi"),
        mse=average("mse"),
        mpiw_soft_batch=average("mpiw"),
        picp_soft=average("picp_soft"),
        picp_hard=metrics.picp_hard(intervals, train.targets),
        mpiw=metrics.mpiw(intervals),
        crossing_rate=metrics.crossing_rate(intervals),
    )


def train(
    params: NetworkParams,
    dataset: Batch,
    config: TrainConfig,
    member: int | None = None,
) -> tuple[NetworkParams, TrainTrace]:
    """Train a copy of `params` on a standardized training split.

    Every epoch visits the samples in a fresh permutation drawn from a stream
    seeded by `config.seed`, so a run is reproducible bit for bit.

    Raises:
        InvalidArgumentError: if the batch size exceeds the training split \
            or the feature dimension does not match the network.
        DivergenceError: if a loss, gradient or parameter becomes \
            non-finite; the error names the epoch and step.
    """

    if config.batch_size > dataset.n:
        raise InvalidArgumentError(
            f"batch size {config.batch_size} exceeds the {dataset.n} "
            f"training samples; lower it with --batch"
        )

    if dataset.d != params.input_dim:
        raise InvalidArgumentError(
            f"the network expects {params.input_dim} features, the dataset "
            f"has {dataset.d}"
        )

    params = params.copy()
    optimizer = make_optimizer(config)
    spread = target_range(dataset)
    rng = np.random.default_rng([config.seed, 1])

    initial = predict(params, dataset.features)
    trace = TrainTrace(initial_crossing_rate=metrics.crossing_rate(initial))

    logger.info(
        "member %s: %s loss, %d samples, initial crossing rate %.3f",
        "-" if member is None else member,
        config.loss_kind,
        dataset.n,
        trace.initial_crossing_rate,
    )

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(dataset.n)
        breakdowns: list[LossBreakdown] = []

        for step, start in enumerate(
            range(0, dataset.n, config.batch_size), start=1
        ):
            batch = dataset.take(order[start : start + config.batch_size])

            try:
                breakdown, grads = gradients(params, batch, config, spread)
            except DomainError as e:
                raise DivergenceError(epoch, step, member, e.message)

            if not all(np.all(np.isfinite(g)) for g in grads.values()):
                raise DivergenceError(
                    epoch, step, member, "non-finite gradient"
                )

            optimizer.step(
                params.as_dict(), clip_gradients(grads, config.clip_norm)
            )

            if not params.is_finite():
                raise DivergenceError(
                    epoch, step, member, "non-finite parameters"
                )

            breakdowns.append(breakdown)

        record = _epoch_record(epoch, breakdowns, params, dataset)
        trace.records.append(record)

        logger.debug(
            "epoch %d: loss %.6g, picp %.3f, mpiw %.4f, crossing %.3f",
            epoch,
            record.total,
            record.picp_hard,
            record.mpiw,
            record.crossing_rate,
        )

    final = trace.records[-1]

    logger.info(
        "member %s: finished %d epochs, train picp %.3f, mpiw %.4f",
        "-" if member is None else member,
        config.epochs,
        final.picp_hard,
        final.mpiw,
    )

    return params, trace


def trace_csv(trace: TrainTrace) -> str:
    """The per-epoch trace as CSV text, one row per epoch."""

    columns = trace.columns()
    lines = [",".join(columns)]

    for record in trace.records:
        lines.append(
            ",".join(repr(getattr(record, column)) for column in columns)
        )

    return "\n".join(lines) + "\n"


_KEYS = {
    "loss": "loss_kind",
    "batch": "batch_size",
    "epochs": "epochs",
    "lr": "learning_rate",
    "optimizer": "optimizer",
    "seed": "seed",
    "clip": "clip_norm",
    "hidden": "hidden",
    "bias_offset": "bias_offset",
}

_LOSS_KEYS = {
    "pc": "confidence_level",
    "lambda": "lambda_",
    "soften": "soften",
    "mpiw_floor": "mpiw_floor",
}


def to_key_value(config: TrainConfig) -> str:
    """Flat `key=value` text covering every field of the config."""

    lines = [f"{key}={getattr(config, field)}" for key, field in _KEYS.items()]
    lines += [
        f"{key}={getattr(config.loss, field)!r}"
        for key, field in _LOSS_KEYS.items()
    ]

    return "\n".join(lines) + "\n"


def config_fields(values: dict[str, str]) -> dict[str, object]:
    """Map flat keys to `TrainConfig` fields; unknown keys are rejected."""

    top: dict[str, object] = {}
    loss: dict[str, object] = {}

    for key, value in values.items():
        if key in _KEYS:
            top[_KEYS[key]] = value
        elif key in _LOSS_KEYS:
            loss[_LOSS_KEYS[key]] = value
        else:
            raise InvalidArgumentError(f"unknown config key `{key}`")

    if loss:
        top["loss"] = loss

    return top


def overlay(config: TrainConfig, values: dict[str, str]) -> TrainConfig:
    """Replace only the fields named by the flat `values` keys.

    Raises:
        InvalidArgumentError: on unknown keys.
        ValidationError: if the result violates a field constraint.
    """

    data = config.model_dump()

    for field, value in config_fields(values).items():
        if field == "loss":
            data["loss"].update(value)  # type:ignore
        else:
            data[field] = value

    return TrainConfig.model_validate(data)


def load_train_config(
    path: str | Path, base: TrainConfig | None = None
) -> TrainConfig:
    """Read an experiment config file written by `to_key_value`.

    Keys present in the file replace those of `base`; the rest keep the
    base values (or the defaults when no base is given).
    """

    path = Path(path)

    if not path.is_file():
        raise NotFoundError(f"config file {path} not found")

    values = {
        key.strip(): (value or "").strip()
        for key, value in dotenv_values(path).items()
    }

    try:
        return overlay(base or TrainConfig(), values)
    except ValidationError as e:
        raise InvalidArgumentError(f"invalid config file {path}: {e}")
