"""Ingestion of user-supplied benchmark CSV files and their profiles.

Files are comma separated, UTF-8, with decimal-point reals. A single header
row is optional: the first row is a header when none of its cells is a
number, and a first row mixing numbers and text is rejected. Blank lines are skipped; every other row must have as many
cells as the first row.
"""

from pathlib import Path

from dotenv import dotenv_values
from pydantic import ValidationError

from ubpi.data import Batch
from ubpi.errors import DatasetError, InvalidArgumentError, NotFoundError
from ubpi.schemas.dataset import DatasetProfile

import csv
import logging
import math


logger = logging.getLogger(__name__)


def _parse_float(cell: str) -> float | None:
    try:
        value = float(cell)
    except ValueError:
        return None

    return value


def _resolve_column(
    column: str | int, names: list[str], what: str
) -> int:
    if isinstance(column, int):
        if not 0 <= column < len(names):
            raise DatasetError(
                f"{what} index {column} is out of range for "
                f"{len(names)} columns",
                column=column,
            )

        return column

    if column in names:
        return names.index(column)

    if column.isdigit():
        return _resolve_column(int(column), names, what)

    raise DatasetError(f"{what} not found", column=column)


def load_csv(
    path: str | Path,
    target_column: str | int,
    drop: tuple[str | int, ...] = (),
) -> Batch:
    """Read a numeric CSV file into a `Batch`, rows in file order.

    :param target_column: The header name or zero-based index of the target.
    :param drop: Columns (names or indices) left out of the features.

    Raises:
        NotFoundError: if the file does not exist.
        DatasetError: if the file is empty, a row is ragged, a cell is not \
            a finite number, or a named column is missing. The message names \
            the offending row and column.
    """

    path = Path(path)

    if not path.is_file():
        raise NotFoundError(f"dataset file {path} not found")

    with path.open(newline="", encoding="utf-8") as f:
        rows = [
            (line, row)
            for line, row in enumerate(csv.reader(f), start=1)
            if row and any(cell.strip() for cell in row)
        ]

    if not rows:
        raise DatasetError(f"dataset file {path} is empty")

    first_line, first = rows[0]
    width = len(first)
    text = [i for i, cell in enumerate(first) if _parse_float(cell) is None]
    has_header = len(text) == width

    if text and not has_header:
        raise DatasetError(
            f"cell {first[text[0]]!r} is not a number and the row is not a "
            f"header",
            row=first_line,
            column=text[0],
        )

    if has_header:
        names = [cell.strip() for cell in first]
        rows = rows[1:]
    else:
        names = [str(i) for i in range(width)]

    if not rows:
        raise DatasetError(f"dataset file {path} has a header but no data")

    target = _resolve_column(target_column, names, "target column")
    dropped = {_resolve_column(c, names, "dropped column") for c in drop}

    if target in dropped:
        raise InvalidArgumentError("the target column cannot be dropped")

    kept = [i for i in range(width) if i != target and i not in dropped]

    if not kept:
        raise DatasetError(f"dataset file {path} has no feature columns")

    features: list[list[float]] = []
    targets: list[float] = []

    for line, row in rows:
        if len(row) != width:
            raise DatasetError(
                f"expected {width} cells but found {len(row)}", row=line
            )

        values: list[float] = []

        for i, cell in enumerate(row):
            value = _parse_float(cell.strip())

            if value is None or not math.isfinite(value):
                raise DatasetError(
                    f"cell {cell!r} is not a finite number",
                    row=line,
                    column=names[i],
                )

            values.append(value)

        features.append([values[i] for i in kept])
        targets.append(values[target])

    logger.info(
        "loaded %d rows x %d features from %s (header: %s)",
        len(targets),
        len(kept),
        path,
        "yes" if has_header else f"no, first data line {first_line}",
    )

    return Batch(features, targets, tuple(names[i] for i in kept))


def _parse_column(value: str) -> str | int:
    value = value.strip()
    return int(value) if value.isdigit() else value


def load_profile(path: str | Path) -> DatasetProfile:
    """Read a key-value dataset profile.

    Recognised keys are `name`, `csv`, `target`, `large` and `drop` (comma
    separated). A relative `csv` path resolves against the profile's folder.
    """

    path = Path(path)

    if not path.is_file():
        raise NotFoundError(f"dataset profile {path} not found")

    values = {
        key.strip().lower(): (value or "").strip()
        for key, value in dotenv_values(path).items()
    }

    for key in ("csv", "target"):
        if not values.get(key):
            raise InvalidArgumentError(
                f"dataset profile {path} is missing the `{key}` key"
            )

    csv_path = Path(values["csv"])

    if not csv_path.is_absolute():
        csv_path = path.parent / csv_path

    drop = tuple(
        _parse_column(c)
        for c in values.get("drop", "").split(",")
        if c.strip()
    )

    try:
        return DatasetProfile(
            name=values.get("name") or path.stem,
            csv=str(csv_path),
            target=_parse_column(values["target"]),
            large=values.get("large", "false").lower()
            in ("1", "true", "yes", "on"),
            drop=drop,
        )
    except ValidationError as e:
        raise InvalidArgumentError(f"invalid dataset profile {path}: {e}")


def load_dataset(profile: DatasetProfile) -> Batch:
    return load_csv(profile.csv, profile.target, profile.drop)
