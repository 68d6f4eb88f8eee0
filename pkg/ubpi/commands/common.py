"""Flags, config assembly and error handling shared by every command."""

from functools import wraps
from pathlib import Path
from typing import Annotated, Any, Callable, ParamSpec, Sequence, TypeVar

from pydantic import ValidationError

from ubpi import metrics
from ubpi.dependencies.configuration import get_configuration
from ubpi.ensemble import Ensemble
from ubpi.errors import InvalidArgumentError, UbpiError
from ubpi.schemas.ensemble import Widening
from ubpi.schemas.loss import LossKind
from ubpi.schemas.report import EvalReport
from ubpi.schemas.train import OptimizerKind, TrainConfig
from ubpi.trainer import load_train_config, overlay, trace_csv

import json
import logging
import typer


logger = logging.getLogger(__name__)

P = ParamSpec("P")
R = TypeVar("R")


PcOption = Annotated[
    float | None, typer.Option("--pc", help="Confidence level P_c.")
]
LambdaOption = Annotated[
    float | None,
    typer.Option("--lambda", help="Weight of the coverage penalty."),
]
SoftenOption = Annotated[
    float | None,
    typer.Option("--soften", help="Softening factor s of soft coverage."),
]
EnsembleOption = Annotated[
    int, typer.Option("--ensemble", min=1, help="Ensemble size m.")
]
SeedOption = Annotated[
    int | None, typer.Option("--seed", min=0, help="Base random seed.")
]
EpochsOption = Annotated[
    int | None, typer.Option("--epochs", min=1, help="Training epochs.")
]
LrOption = Annotated[
    float | None, typer.Option("--lr", help="Learning rate.")
]
BatchOption = Annotated[
    int | None, typer.Option("--batch", min=1, help="Mini-batch size n.")
]
LossOption = Annotated[
    LossKind | None, typer.Option("--loss", help="Training loss.")
]
OptimizerOption = Annotated[
    OptimizerKind | None, typer.Option("--optimizer", help="Optimizer.")
]
WidenOption = Annotated[
    Widening,
    typer.Option(
        "--widen", help="Widen the mean interval by variance or std."
    ),
]
OutOption = Annotated[
    Path | None,
    typer.Option(
        "--out", help="Output directory (default: $UBPI_OUTPUT_DIR)."
    ),
]
ConfigOption = Annotated[
    Path | None,
    typer.Option("--config", help="Key-value experiment config file."),
]


def build_config(
    base: TrainConfig | None = None,
    config_file: Path | None = None,
    flags: dict[str, Any] | None = None,
) -> TrainConfig:
    """Merge defaults, an optional config file and explicit flags.

    Flags left at `None` keep the value from the file (or the base).

    Raises:
        InvalidArgumentError: if the merged config violates an invariant.
    """

    config = base or TrainConfig()

    if config_file:
        config = load_train_config(config_file, config)

    values = {
        key: str(value)
        for key, value in (flags or {}).items()
        if value is not None
    }

    try:
        return overlay(config, values)
    except ValidationError as e:
        raise InvalidArgumentError(f"invalid configuration: {e}")


def echo_config(command: str, config: TrainConfig, **settings: Any) -> None:
    """Log every effective parameter so the run can be reproduced."""

    payload = {
        "command": command,
        **{key: _jsonable(value) for key, value in settings.items()},
        "config": config.model_dump(mode="json"),
    }

    logger.info("effective configuration: %s", json.dumps(payload))


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)

    if isinstance(value, tuple):
        return list(value)

    return value


def handle_errors(command: Callable[P, R]) -> Callable[P, R]:
    """Turn package errors into a logged message and the error's exit code."""

    @wraps(command)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        try:
            return command(*args, **kwargs)
        except UbpiError as e:
            logger.error("%s", e.message)
            raise typer.Exit(code=e.exit_code)

    return wrapper


def parse_floats(value: str | None) -> tuple[float, ...] | None:
    """Parse a comma-separated list of non-negative reals."""

    if value is None:
        return None

    try:
        numbers = tuple(float(v) for v in value.split(",") if v.strip())
    except ValueError:
        raise typer.BadParameter(f"expected numbers, got {value!r}")

    if not numbers or any(not n >= 0.0 for n in numbers):
        raise typer.BadParameter("expected non-negative numbers")

    return numbers


def parse_gap(value: str | None) -> tuple[float, float] | None:
    """Parse `lo:hi` into a pair with lo < hi."""

    if value is None:
        return None

    lo, sep, hi = value.partition(":")

    try:
        if not sep:
            raise ValueError

        gap = float(lo), float(hi)
    except ValueError:
        raise typer.BadParameter(f"expected lo:hi, got {value!r}")

    if not gap[0] < gap[1]:
        raise typer.BadParameter(f"empty gap {value!r}")

    return gap


def render_table(
    headers: Sequence[str], rows: Sequence[Sequence[Any]]
) -> str:
    """Aligned plain-text table; floats get three decimals."""

    def cell(value: Any) -> str:
        if isinstance(value, float):
            return f"{value:.3f}"

        return str(value)

    cells = [[cell(v) for v in row] for row in rows]
    widths = [
        max([len(headers[i]), *(len(row[i]) for row in cells)])
        for i in range(len(headers))
    ]

    def line(values: Sequence[str]) -> str:
        return "  ".join(v.rjust(w) for v, w in zip(values, widths)).rstrip()

    separator = "  ".join("-" * w for w in widths)

    return "\n".join([line(headers), separator, *map(line, cells)]) + "\n"


def write_csv(
    path: Path, headers: Sequence[str], rows: Sequence[Sequence[Any]]
) -> Path:
    def cell(value: Any) -> str:
        if value is None:
            return ""

        if isinstance(value, float):
            return repr(value)

        return str(value)

    lines = [",".join(headers)]
    lines += [",".join(cell(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    return path


def write_report(directory: Path, report: EvalReport) -> None:
    """`report.txt` (key-value) and `report.csv` (header + one row)."""

    (directory / "report.txt").write_text(
        metrics.to_key_value(report), encoding="utf-8"
    )
    (directory / "report.csv").write_text(
        metrics.csv_header() + "\n" + metrics.to_csv_row(report) + "\n",
        encoding="utf-8",
    )


def write_traces(directory: Path, ensemble: Ensemble) -> None:
    for i, trace in enumerate(ensemble.traces):
        (directory / f"trace_member_{i}.csv").write_text(
            trace_csv(trace), encoding="utf-8"
        )


def output_directory(out: Path | None, *parts: str) -> Path:
    return Path(
        get_configuration().resolve_output(
            str(out) if out else None, *parts
        )
    )
