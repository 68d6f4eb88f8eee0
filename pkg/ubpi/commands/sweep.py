"""`ubpi sweep`: the coverage/width trade-off over several lambda values."""

from typing import Annotated

from ubpi.commands.common import (
    BatchOption,
    ConfigOption,
    EnsembleOption,
    EpochsOption,
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
    parse_floats,
    render_table,
    write_csv,
)
from ubpi.commands.train import ProfileArgument
from ubpi.data.ingest import load_dataset, load_profile
from ubpi.dependencies.configuration import get_configuration
from ubpi.schemas.ensemble import Widening
from ubpi.schemas.train import TrainConfig
from ubpi.trainer.experiments import DEFAULT_LAMBDAS, prepare, sweep_lambda

import logging
import typer


logger = logging.getLogger(__name__)

HEADERS = ("lambda", "picp", "mpiw")


@handle_errors
def sweep(
    profile: ProfileArgument,
    lambdas: Annotated[
        str | None,
        typer.Option(
            "--lambdas",
            help="Comma-separated lambda values (default 5,10,...,60).",
        ),
    ] = None,
    pc: PcOption = None,
    soften: SoftenOption = None,
    ensemble: EnsembleOption = 5,
    seed: SeedOption = None,
    epochs: EpochsOption = None,
    lr: LrOption = None,
    batch: BatchOption = None,
    loss: LossOption = None,
    widen: WidenOption = Widening.VARIANCE,
    config_file: ConfigOption = None,
    out: OutOption = None,
) -> None:
    """Train one ensemble per lambda on a single split; tabulate PICP/MPIW."""

    values = parse_floats(lambdas) or DEFAULT_LAMBDAS
    dataset_profile = load_profile(profile)
    config = build_config(
        base=TrainConfig(hidden=dataset_profile.hidden),
        config_file=config_file,
        flags={
            "pc": pc,
            "soften": soften,
            "seed": seed,
            "epochs": epochs,
            "lr": lr,
            "batch": batch,
            "loss": loss,
        },
    )
    configuration = get_configuration()
    directory = output_directory(out, f"sweep-{dataset_profile.name}")

    echo_config(
        "sweep",
        config,
        profile=dataset_profile.model_dump(mode="json"),
        lambdas=values,
        ensemble=ensemble,
        widen=str(widen),
        out=directory,
        workers=configuration.workers,
    )

    prepared = prepare(load_dataset(dataset_profile), config.seed)
    rows = sweep_lambda(
        prepared,
        config,
        values,
        m=ensemble,
        workers=configuration.workers,
        widening=widen,
    )
    table = [(row.lambda_, row.picp, row.mpiw) for row in rows]

    (directory / "sweep.txt").write_text(
        render_table(HEADERS, table), encoding="utf-8"
    )
    write_csv(directory / "sweep.csv", HEADERS, table)

    logger.info("%d lambda values swept; results in %s", len(rows), directory)
