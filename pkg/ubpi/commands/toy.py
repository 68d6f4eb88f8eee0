"""`ubpi toy`: train an ensemble on a synthetic 1-D problem and plot it."""

from enum import unique

from ubpi._compat import StrEnum
from pathlib import Path
from typing import Annotated

from numpy.typing import NDArray

from ubpi import metrics
from ubpi.commands.common import (
    BatchOption,
    EnsembleOption,
    EpochsOption,
    LambdaOption,
    LossOption,
    LrOption,
    OutOption,
    PcOption,
    SeedOption,
    SoftenOption,
    WidenOption,
    build_config,
    echo_config,
    handle_errors,
    output_directory,
    parse_gap,
    write_csv,
    write_report,
    write_traces,
)
from ubpi.data.standardize import Standardizer
from ubpi.data.toy import (
    HETEROSCEDASTIC_RANGE,
    WAVE_RANGE,
    NoiseReading,
    toy_heteroscedastic,
    toy_wave,
)
from ubpi.dependencies.configuration import get_configuration
from ubpi.ensemble import epistemic_variance, train_ensemble
from ubpi.ensemble.snapshot import save_ensemble
from ubpi.plotting import plot_toy
from ubpi.schemas.ensemble import Widening
from ubpi.schemas.train import TrainConfig

import logging
import numpy as np
import typer


logger = logging.getLogger(__name__)

GRID_POINTS = 400


@unique
class ToyKind(StrEnum):
    WAVE = "wave"
    HETEROSCEDASTIC = "heteroscedastic"


@handle_errors
def toy(
    which: Annotated[ToyKind, typer.Argument(help="The toy problem.")],
    pc: PcOption = None,
    lambda_: LambdaOption = None,
    soften: SoftenOption = None,
    ensemble: EnsembleOption = 5,
    seed: SeedOption = None,
    epochs: EpochsOption = None,
    lr: LrOption = None,
    batch: BatchOption = None,
    loss: LossOption = None,
    gap: Annotated[
        str | None,
        typer.Option(
            "--gap",
            help="lo:hi input interval left empty (heteroscedastic only).",
        ),
    ] = None,
    noise: Annotated[
        NoiseReading,
        typer.Option("--noise", help="Read the wave noise as variance/std."),
    ] = NoiseReading.VARIANCE,
    widen: WidenOption = Widening.VARIANCE,
    n: Annotated[
        int, typer.Option("--n", min=2, help="Number of training points.")
    ] = 100,
    out: OutOption = None,
) -> None:
    """Train on a toy problem; write the interval figure, CSVs and report."""

    interval_gap = parse_gap(gap)

    if interval_gap is not None and which != ToyKind.HETEROSCEDASTIC:
        raise typer.BadParameter(
            "--gap only applies to the heteroscedastic toy"
        )

    config = build_config(
        base=TrainConfig(epochs=200),
        flags={
            "pc": pc,
            "lambda": lambda_,
            "soften": soften,
            "seed": seed,
            "epochs": epochs,
            "lr": lr,
            "batch": batch,
            "loss": loss,
        },
    )
    configuration = get_configuration()
    directory = output_directory(out, f"toy-{which}")

    echo_config(
        "toy",
        config,
        which=str(which),
        ensemble=ensemble,
        gap=interval_gap,
        noise=str(noise),
        widen=str(widen),
        n=n,
        out=directory,
        workers=configuration.workers,
    )

    if which == ToyKind.WAVE:
        data = toy_wave(n, config.seed, noise=noise)
        x_range = WAVE_RANGE
    else:
        data = toy_heteroscedastic(n, config.seed, gap=interval_gap)
        x_range = HETEROSCEDASTIC_RANGE

    standardizer = Standardizer.fit(data)
    train = standardizer.apply(data)
    trained = train_ensemble(
        train,
        config,
        m=ensemble,
        workers=configuration.workers,
        widening=widen,
        standardizer=standardizer,
    )
    report = metrics.evaluate(trained, train, standardizer)

    grid = np.linspace(x_range[0], x_range[1], GRID_POINTS)
    aggregate = trained.aggregate(
        standardizer.apply_features(grid.reshape(-1, 1))
    )
    lower = standardizer.invert_targets(aggregate.lower)
    upper = standardizer.invert_targets(aggregate.upper)
    x = data.features[:, 0]

    plot_toy(
        directory / "intervals.svg",
        x,
        data.targets,
        grid,
        lower,
        upper,
        title=f"{which} (m={ensemble}, P_c={config.loss.confidence_level})",
    )
    write_csv(
        directory / "points.csv", ("x", "y"), list(zip(x, data.targets))
    )
    write_csv(
        directory / "bounds.csv",
        ("x", "lower", "upper"),
        list(zip(grid, lower, upper)),
    )
    write_report(directory, report)
    write_traces(directory, trained)
    save_ensemble(directory / "ensemble", trained)

    if interval_gap is not None:
        _write_epistemic(
            directory, grid, epistemic_variance(aggregate), interval_gap
        )

    logger.info(
        "train picp %.3f, mpiw %.3f (raw %.3f); results in %s",
        report.picp_hard,
        report.mpiw,
        report.mpiw_raw,
        directory,
    )


def _write_epistemic(
    directory: Path,
    grid: NDArray[np.float64],
    variance: NDArray[np.float64],
    gap: tuple[float, float],
) -> None:
    """Mean ensemble variance on the grid inside and outside the gap."""

    inside = (grid >= gap[0]) & (grid <= gap[1])
    summary = {
        "inside": float(np.mean(variance[inside])) if inside.any() else None,
        "outside": (
            float(np.mean(variance[~inside])) if (~inside).any() else None
        ),
    }

    (directory / "epistemic.txt").write_text(
        "".join(
            f"mean_variance_{key}={'' if value is None else repr(value)}\n"
            for key, value in summary.items()
        ),
        encoding="utf-8",
    )

    logger.info(
        "mean epistemic variance inside the gap %s, outside %s",
        summary["inside"],
        summary["outside"],
    )
