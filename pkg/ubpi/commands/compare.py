"""`ubpi compare`: one ensemble per loss on the same split, best marked."""

from typing import Annotated

from ubpi.commands.common import (
    BatchOption,
    ConfigOption,
    EnsembleOption,
    EpochsOption,
    LambdaOption,
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
    render_table,
    write_csv,
)
from ubpi.commands.train import ProfileArgument
from ubpi.data.ingest import load_dataset, load_profile
from ubpi.dependencies.configuration import get_configuration
from ubpi.schemas.ensemble import Widening
from ubpi.schemas.loss import LossKind
from ubpi.schemas.train import TrainConfig
from ubpi.trainer.experiments import compare_methods, prepare

import logging
import typer


logger = logging.getLogger(__name__)

HEADERS = ("method", "picp", "mpiw", "best")


def parse_methods(value: str | None) -> tuple[LossKind, ...]:
    if value is None:
        return tuple(LossKind)

    try:
        kinds = tuple(
            LossKind(v.strip().lower()) for v in value.split(",") if v.strip()
        )
    except ValueError:
        choices = ", ".join(LossKind)
        raise typer.BadParameter(f"expected some of {choices}, got {value!r}")

    if not kinds:
        raise typer.BadParameter("no methods given")

    return tuple(dict.fromkeys(kinds))


@handle_errors
def compare(
    profile: ProfileArgument,
    methods: Annotated[
        str | None,
        typer.Option(
            "--methods", help="Comma-separated losses (default: all four)."
        ),
    ] = None,
    pc: PcOption = None,
    lambda_: LambdaOption = None,
    soften: SoftenOption = None,
    ensemble: EnsembleOption = 5,
    seed: SeedOption = None,
    epochs: EpochsOption = None,
    lr: LrOption = None,
    batch: BatchOption = None,
    widen: WidenOption = Widening.VARIANCE,
    config_file: ConfigOption = None,
    out: OutOption = None,
) -> None:
    """Compare losses by test PICP and MPIW; the best row is starred."""

    kinds = parse_methods(methods)
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
        },
    )
    configuration = get_configuration()
    directory = output_directory(out, f"compare-{dataset_profile.name}")

    echo_config(
        "compare",
        config,
        profile=dataset_profile.model_dump(mode="json"),
        methods=[str(kind) for kind in kinds],
        ensemble=ensemble,
        widen=str(widen),
        out=directory,
        workers=configuration.workers,
    )

    prepared = prepare(load_dataset(dataset_profile), config.seed)
    rows = compare_methods(
        prepared,
        config,
        kinds,
        m=ensemble,
        workers=configuration.workers,
        widening=widen,
    )

    (directory / "compare.txt").write_text(
        render_table(
            HEADERS,
            [
                (row.method, row.picp, row.mpiw, "*" if row.best else "")
                for row in rows
            ],
        ),
        encoding="utf-8",
    )
    write_csv(
        directory / "compare.csv",
        HEADERS,
        [(row.method, row.picp, row.mpiw, int(row.best)) for row in rows],
    )

    for row in rows:
        if row.best:
            logger.info("best method: %s", row.method)
