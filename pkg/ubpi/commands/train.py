"""`ubpi train`: fit ensembles on a dataset, report on the test split."""

from pathlib import Path
from typing import Annotated

from ubpi import metrics
from ubpi.commands.common import (
    BatchOption,
    ConfigOption,
    EnsembleOption,
    EpochsOption,
    LambdaOption,
    LossOption,
    LrOption,
    OptimizerOption,
    OutOption,
    PcOption,
    SeedOption,
    SoftenOption,
    WidenOption,
    build_config,
    echo_config,
    handle_errors,
    output_directory,
    write_report,
    write_traces,
)
from ubpi.data.ingest import load_dataset, load_profile
from ubpi.dependencies.configuration import get_configuration
from ubpi.ensemble.snapshot import save_ensemble
from ubpi.schemas.ensemble import Widening
from ubpi.schemas.train import TrainConfig
from ubpi.trainer.experiments import run_benchmark

import logging
import typer


logger = logging.getLogger(__name__)

ProfileArgument = Annotated[
    Path, typer.Argument(help="Key-value dataset profile file.")
]


@handle_errors
def train(
    profile: ProfileArgument,
    pc: PcOption = None,
    lambda_: LambdaOption = None,
    soften: SoftenOption = None,
    ensemble: EnsembleOption = 5,
    seed: SeedOption = None,
    epochs: EpochsOption = None,
    lr: LrOption = None,
    batch: BatchOption = None,
    loss: LossOption = None,
    optimizer: OptimizerOption = None,
    widen: WidenOption = Widening.VARIANCE,
    repeats: Annotated[
        int,
        typer.Option(
            "--repeats", min=1, help="Independent split/train repetitions."
        ),
    ] = 1,
    config_file: ConfigOption = None,
    out: OutOption = None,
) -> None:
    """Train on a 90/10 split of the dataset and evaluate on the 10%.

    With `--repeats N` the dataset is re-split N times (seeds seed..seed+N-1)
    and the mean report is written next to the per-run rows.
    """

    dataset_profile = load_profile(profile)
    config = build_config(
        base=TrainConfig(hidden=dataset_profile.hidden),
        config_file=config_file,
        flags={
            "pc": pc,
            "lambda": lambda_,
            "soften": soften,
            "seed": seed,
            "epochs": epochs,
            "lr": lr,
            "batch": batch,
            "loss": loss,
            "optimizer": optimizer,
        },
    )
    configuration = get_configuration()
    directory = output_directory(out, f"train-{dataset_profile.name}")

    echo_config(
        "train",
        config,
        profile=dataset_profile.model_dump(mode="json"),
        ensemble=ensemble,
        widen=str(widen),
        repeats=repeats,
        out=directory,
        workers=configuration.workers,
    )

    result = run_benchmark(
        load_dataset(dataset_profile),
        config,
        m=ensemble,
        repeats=repeats,
        workers=configuration.workers,
        widening=widen,
    )

    for r, trained in enumerate(result.ensembles):
        run_directory = directory / f"run_{r}"
        save_ensemble(run_directory / "ensemble", trained)
        write_traces(run_directory, trained)

    write_report(directory, result.mean)

    rows = [
        f"{r},{metrics.to_csv_row(report)}"
        for r, report in enumerate(result.reports)
    ]
    (directory / "runs.csv").write_text(
        "\n".join(
            [f"run,{metrics.csv_header()}", *rows]
            + [f"mean,{metrics.to_csv_row(result.mean)}"]
        )
        + "\n",
        encoding="utf-8",
    )

    logger.info(
        "test picp %.3f, mpiw %.3f over %d run(s); results in %s",
        result.mean.picp_hard,
        result.mean.mpiw,
        repeats,
        directory,
    )
