"""Experiment protocols built on top of ensembles.

`prepare` turns a raw dataset into a standardized 90/10 split;
`sweep_lambda`, `run_benchmark` and `compare_methods` train and evaluate
ensembles on such splits.
"""

from dataclasses import dataclass
from typing import Sequence

from ubpi import metrics
from ubpi.data import Batch, split
from ubpi.data.standardize import Standardizer
from ubpi.ensemble import Ensemble, member_seeds, run_jobs
from ubpi.errors import InvalidArgumentError
from ubpi.schemas.ensemble import Widening
from ubpi.schemas.loss import LossKind
from ubpi.schemas.report import ComparisonRow, EvalReport, SweepRow
from ubpi.schemas.train import TrainConfig

import logging


logger = logging.getLogger(__name__)


DEFAULT_LAMBDAS = (5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0)


@dataclass(frozen=True)
class PreparedSplit:
    """Standardized train/test batches and the standardizer fitted on train."""

    train: Batch
    test: Batch
    standardizer: Standardizer
    seed: int = 0
    train_fraction: float = 0.9


def prepare(
    dataset: Batch, seed: int = 0, train_fraction: float = 0.9
) -> PreparedSplit:
    train, test = split(dataset, train_fraction, seed)
    standardizer = Standardizer.fit(train)

    return PreparedSplit(
        standardizer.apply(train),
        standardizer.apply(test),
        standardizer,
        seed,
        train_fraction,
    )


def _train_cells(
    prepared: PreparedSplit,
    configs: Sequence[TrainConfig],
    m: int,
    workers: int,
    widening: Widening,
) -> list[Ensemble]:
    """Train one ensemble per config; all members share one worker pool."""

    jobs = [
        (member, seed, prepared.train, config)
        for config in configs
        for member, seed in enumerate(member_seeds(config.seed, m))
    ]
    results = run_jobs(jobs, workers)

    ensembles: list[Ensemble] = []

    for cell, config in enumerate(configs):
        cell_results = results[cell * m : (cell + 1) * m]
        ensembles.append(
            Ensemble(
                members=[params for params, _ in cell_results],
                seeds=member_seeds(config.seed, m),
                config=config,
                widening=widening,
                standardizer=prepared.standardizer,
                traces=[trace for _, trace in cell_results],
                split_seed=prepared.seed,
                train_fraction=prepared.train_fraction,
            )
        )

    return ensembles


def sweep_lambda(
    prepared: PreparedSplit,
    config: TrainConfig,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    m: int = 5,
    workers: int = 1,
    widening: Widening = Widening.VARIANCE,
) -> list[SweepRow]:
    """Train and evaluate one ensemble per lambda, same seed for all.

    Rows come back in the order of `lambdas`; PICP and MPIW are measured
    on the test split.
    """

    if len(lambdas) < 2:
        raise InvalidArgumentError("a sweep needs at least two lambda values")

    if any(not value >= 0.0 for value in lambdas):
        raise InvalidArgumentError(f"lambda values must be >= 0: {lambdas}")

    configs = [
        config.model_copy(
            update={"loss": config.loss.model_copy(update={"lambda_": value})}
        )
        for value in lambdas
    ]
    ensembles = _train_cells(prepared, configs, m, workers, widening)
    rows: list[SweepRow] = []

    for value, ensemble in zip(lambdas, ensembles):
        report = metrics.evaluate(
            ensemble, prepared.test, prepared.standardizer
        )
        rows.append(
            SweepRow(lambda_=value, picp=report.picp_hard, mpiw=report.mpiw)
        )

        logger.info(
            "lambda %g: picp %.3f, mpiw %.3f",
            value,
            report.picp_hard,
            report.mpiw,
        )

    return rows


@dataclass(frozen=True)
class BenchmarkResult:
    reports: list[EvalReport]
    mean: EvalReport
    ensembles: list[Ensemble]
    splits: list[PreparedSplit]


def run_benchmark(
    dataset: Batch,
    config: TrainConfig,
    m: int = 5,
    repeats: int = 1,
    train_fraction: float = 0.9,
    workers: int = 1,
    widening: Widening = Widening.VARIANCE,
) -> BenchmarkResult:
    """Repeat split, train and test-evaluate, then average the reports.

    Repetition `r` splits with seed `config.seed + r` and trains members
    with seeds starting at the same value.
    """

    if repeats < 1:
        raise InvalidArgumentError("at least one repetition is needed")

    reports: list[EvalReport] = []
    ensembles: list[Ensemble] = []
    splits: list[PreparedSplit] = []

    for r in range(repeats):
        seed = config.seed + r
        prepared = prepare(dataset, seed, train_fraction)
        cell_config = config.model_copy(update={"seed": seed})
        (ensemble,) = _train_cells(
            prepared, [cell_config], m, workers, widening
        )
        report = metrics.evaluate(
            ensemble, prepared.test, prepared.standardizer
        )

        logger.info(
            "repetition %d/%d: picp %.3f, mpiw %.3f",
            r + 1,
            repeats,
            report.picp_hard,
            report.mpiw,
        )

        reports.append(report)
        ensembles.append(ensemble)
        splits.append(prepared)

    return BenchmarkResult(
        reports, metrics.mean_report(reports), ensembles, splits
    )


def mark_best(
    rows: list[ComparisonRow], confidence_level: float
) -> list[ComparisonRow]:
    """Flag the best method.

    Methods reaching the confidence level qualify; when none does, the
    largest coverage qualifies. Among qualifiers the narrowest wins.
    """

    if not rows:
        return rows

    qualifying = [row for row in rows if row.picp >= confidence_level]

    if not qualifying:
        top = max(row.picp for row in rows)
        qualifying = [row for row in rows if row.picp == top]

    best = min(qualifying, key=lambda row: row.mpiw)

    return [
        row.model_copy(update={"best": row is best}) for row in rows
    ]


def compare_methods(
    prepared: PreparedSplit,
    config: TrainConfig,
    kinds: Sequence[LossKind] = tuple(LossKind),
    m: int = 5,
    workers: int = 1,
    widening: Widening = Widening.VARIANCE,
) -> list[ComparisonRow]:
    """Train one ensemble per loss on the same split and mark the best."""

    if not kinds:
        raise InvalidArgumentError("no methods to compare")

    configs = [config.model_copy(update={"loss_kind": kind}) for kind in kinds]
    ensembles = _train_cells(prepared, configs, m, workers, widening)
    rows = []

    for kind, ensemble in zip(kinds, ensembles):
        report = metrics.evaluate(
            ensemble, prepared.test, prepared.standardizer
        )
        rows.append(
            ComparisonRow(
                method=str(kind), picp=report.picp_hard, mpiw=report.mpiw
            )
        )

    return mark_best(rows, config.loss.confidence_level)
