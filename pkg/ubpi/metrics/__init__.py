"""Hard interval quality measures and their report codecs."""

from typing import Protocol

from numpy.typing import ArrayLike, NDArray

from ubpi.data import Batch
from ubpi.data.standardize import Standardizer
from ubpi.errors import InvalidArgumentError
from ubpi.models.network import Intervals, NetworkParams, predict
from ubpi.schemas.report import EvalReport

import numpy as np


REPORT_COLUMNS = (
    "picp_hard",
    "mpiw",
    "mse_midpoint",
    "crossing_rate",
    "n",
    "mpiw_raw",
    "mse_raw",
)
"""The documented column order of the report CSV row."""


class IntervalPredictor(Protocol):
    """Anything that maps a feature matrix to intervals."""

    def predict(self, features: ArrayLike) -> Intervals: ...


def _check(intervals: Intervals, ys: ArrayLike) -> NDArray[np.float64]:
    y = np.asarray(ys, dtype=np.float64).reshape(-1)

    if intervals.n < 1:
        raise InvalidArgumentError("cannot evaluate an empty batch")

    if y.shape[0] != intervals.n:
        raise InvalidArgumentError(
            f"{intervals.n} intervals but {y.shape[0]} targets"
        )

    return y


def covered(intervals: Intervals, ys: ArrayLike) -> NDArray[np.bool_]:
    """Closed-interval membership lower <= y <= upper."""

    y = _check(intervals, ys)

    return (intervals.lower <= y) & (y <= intervals.upper)


def picp_hard(intervals: Intervals, ys: ArrayLike) -> float:
    return float(np.mean(covered(intervals, ys)))


def mpiw(intervals: Intervals) -> float:
    """Mean raw width; negative widths of crossed intervals are kept."""

    if intervals.n < 1:
        raise InvalidArgumentError("cannot evaluate an empty batch")

    return float(np.mean(intervals.width))


def mse_midpoint(intervals: Intervals, ys: ArrayLike) -> float:
    y = _check(intervals, ys)

    return float(np.mean((intervals.midpoint - y) ** 2))


def crossing_rate(intervals: Intervals) -> float:
    if intervals.n < 1:
        raise InvalidArgumentError("cannot evaluate an empty batch")

    return float(np.mean(intervals.crossed))


def report(
    intervals: Intervals,
    ys: ArrayLike,
    standardizer: Standardizer | None = None,
) -> EvalReport:
    """Every hard measure of `intervals` against `ys`.

    Intervals and targets are expected on the standardized scale; when the
    standardizer is given the raw-scale width and error are added.
    """

    y = _check(intervals, ys)
    width = mpiw(intervals)
    error = mse_midpoint(intervals, y)

    return EvalReport(
        picp_hard=picp_hard(intervals, y),
        mpiw=width,
        mse_midpoint=error,
        crossing_rate=crossing_rate(intervals),
        n=intervals.n,
        mpiw_raw=(
            float(standardizer.scale_width(width)) if standardizer else None
        ),
        mse_raw=(
            error * standardizer.target_std**2 if standardizer else None
        ),
    )


class _NetworkPredictor:
    def __init__(self, params: NetworkParams) -> None:
        self.params = params

    def predict(self, features: ArrayLike) -> Intervals:
        return predict(self.params, features)


def evaluate(
    model: NetworkParams | IntervalPredictor,
    split: Batch,
    standardizer: Standardizer | None = None,
) -> EvalReport:
    """Evaluate a single network or an ensemble on a standardized split.

    Raises:
        InvalidArgumentError: if the model has non-finite parameters or \
            produces non-finite bounds.
    """

    if isinstance(model, NetworkParams):
        if not model.is_finite():
            raise InvalidArgumentError("the model has non-finite parameters")

        model = _NetworkPredictor(model)

    intervals = model.predict(split.features)

    if not (
        np.all(np.isfinite(intervals.lower))
        and np.all(np.isfinite(intervals.upper))
    ):
        raise InvalidArgumentError("the model produced non-finite bounds")

    return report(intervals, split.targets, standardizer)


def mean_report(reports: list[EvalReport]) -> EvalReport:
    """Average several reports field by field (raw fields when all have it)."""

    if not reports:
        raise InvalidArgumentError("no reports to average")

    def average(field: str) -> float | None:
        values = [getattr(r, field) for r in reports]

        if any(v is None for v in values):
            return None

        return float(np.mean(values))

    return EvalReport(
        picp_hard=average("picp_hard"),  # type:ignore
        mpiw=average("mpiw"),  # type:ignore
        mse_midpoint=average("mse_midpoint"),  # type:ignore
        crossing_rate=average("crossing_rate"),  # type:ignore
        n=sum(r.n for r in reports),
        mpiw_raw=average("mpiw_raw"),
        mse_raw=average("mse_raw"),
    )


def _format(value: float | int | None) -> str:
    if value is None:
        return ""

    if isinstance(value, int):
        return str(value)

    return repr(float(value))


def to_key_value(report: EvalReport) -> str:
    """One `key=value` line per field, in `REPORT_COLUMNS` order."""

    return "".join(
        f"{column}={_format(getattr(report, column))}\n"
        for column in REPORT_COLUMNS
    )


def csv_header() -> str:
    return ",".join(REPORT_COLUMNS)


def to_csv_row(report: EvalReport) -> str:
    return ",".join(
        _format(getattr(report, column)) for column in REPORT_COLUMNS
    )
