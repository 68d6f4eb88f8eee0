"""`ubpi plot`: upper/lower bound polylines over a range of test samples."""

from pathlib import Path
from typing import Annotated

from ubpi.commands.common import (
    OutOption,
    echo_config,
    handle_errors,
    output_directory,
)
from ubpi.commands.train import ProfileArgument
from ubpi.data.ingest import load_dataset, load_profile
from ubpi.ensemble.snapshot import load_ensemble
from ubpi.errors import InvalidArgumentError, SnapshotError
from ubpi.plotting import plot_intervals
from ubpi.trainer.experiments import prepare

import logging
import typer


logger = logging.getLogger(__name__)


@handle_errors
def plot(
    snapshot: Annotated[
        Path, typer.Argument(help="Ensemble snapshot directory.")
    ],
    profile: ProfileArgument,
    start: Annotated[
        int, typer.Option("--start", help="First test sample (inclusive).")
    ] = 0,
    stop: Annotated[
        int, typer.Option("--stop", help="Last test sample (exclusive).")
    ] = 50,
    out: OutOption = None,
) -> None:
    """Plot test samples [start, stop) with the ensemble's bounds.

    The test split is rebuilt from the dataset with the split seed and
    fraction recorded in the snapshot.
    """

    trained = load_ensemble(snapshot)

    if trained.split_seed is None:
        raise SnapshotError(
            f"{snapshot} was not trained on a dataset split; nothing to plot"
        )

    dataset_profile = load_profile(profile)
    prepared = prepare(
        load_dataset(dataset_profile),
        trained.split_seed,
        trained.train_fraction,
    )
    test = prepared.test

    if not 0 <= start < stop:
        raise InvalidArgumentError(f"empty sample range [{start}, {stop})")

    if stop > test.n:
        raise InvalidArgumentError(
            f"sample range [{start}, {stop}) exceeds the {test.n} test "
            "samples"
        )

    if trained.members[0].input_dim != test.d:
        raise SnapshotError(
            f"{snapshot} expects {trained.members[0].input_dim} features, "
            f"the dataset has {test.d}"
        )

    directory = output_directory(out, f"plot-{dataset_profile.name}")

    echo_config(
        "plot",
        trained.config,
        snapshot=snapshot,
        profile=dataset_profile.model_dump(mode="json"),
        start=start,
        stop=stop,
        out=directory,
    )

    window = test.take(range(start, stop))
    intervals = trained.predict(window.features)
    standardizer = prepared.standardizer

    path = plot_intervals(
        directory / "intervals.svg",
        standardizer.invert_targets(window.targets),
        standardizer.invert_targets(intervals.lower),
        standardizer.invert_targets(intervals.upper),
        start=start,
    )

    logger.info("wrote %s", path)
