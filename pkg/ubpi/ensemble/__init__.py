"""Deep ensembles of interval networks.

Members differ only by their initialization seed; each is trained on the
whole training split. The final interval is the mean member interval widened
by the cross-member variance of each bound.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from numpy.typing import ArrayLike, NDArray

from ubpi.data import Batch
from ubpi.data.standardize import Standardizer
from ubpi.errors import InvalidArgumentError
from ubpi.errors.numeric import DivergenceError
from ubpi.models.network import Intervals, NetworkParams, init_network
from ubpi.models.network import predict as network_predict
from ubpi.schemas.ensemble import Widening
from ubpi.schemas.train import TrainConfig, TrainTrace
from ubpi.trainer import train

import logging
import numpy as np


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EnsembleAggregate:
    """Per-sample member statistics and the final widened interval."""

    mu_lower: NDArray[np.float64]
    mu_upper: NDArray[np.float64]
    var_lower: NDArray[np.float64]
    var_upper: NDArray[np.float64]
    lower: NDArray[np.float64]
    upper: NDArray[np.float64]
    m: int

    @property
    def intervals(self) -> Intervals:
        return Intervals(self.lower, self.upper)

    @property
    def mean_intervals(self) -> Intervals:
        return Intervals(self.mu_lower, self.mu_upper)


def epistemic_variance(aggregate: EnsembleAggregate) -> NDArray[np.float64]:
    """var_lower + var_upper per sample: the model-uncertainty signal."""

    return aggregate.var_lower + aggregate.var_upper


def _mean_and_variance(
    stacked: NDArray[np.float64],
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    # sorting over members makes the float sums independent of member order
    ordered = np.sort(stacked, axis=0)
    m = ordered.shape[0]
    mean = ordered.sum(axis=0) / m

    if m == 1:
        return mean, np.zeros_like(mean)

    variance = ((ordered - mean) ** 2).sum(axis=0) / (m - 1)

    return mean, variance


def aggregate(
    member_intervals: Sequence[Intervals],
    widening: Widening = Widening.VARIANCE,
) -> EnsembleAggregate:
    """Combine member intervals into the ensemble interval.

    Means use 1/m, variances the unbiased 1/(m-1) (zero for a single
    member). The final bounds are mean -/+ variance, or mean -/+ standard
    deviation when `widening` is `std`.

    Raises:
        InvalidArgumentError: if there are no members or their sample \
            counts differ.
    """

    if not member_intervals:
        raise InvalidArgumentError("an ensemble needs at least one member")

    sizes = {intervals.n for intervals in member_intervals}

    if len(sizes) != 1:
        raise InvalidArgumentError(
            f"members report different sample counts: {sorted(sizes)}"
        )

    mu_lower, var_lower = _mean_and_variance(
        np.stack([intervals.lower for intervals in member_intervals])
    )
    mu_upper, var_upper = _mean_and_variance(
        np.stack([intervals.upper for intervals in member_intervals])
    )

    if widening == Widening.STD:
        spread_lower, spread_upper = np.sqrt(var_lower), np.sqrt(var_upper)
    else:
        spread_lower, spread_upper = var_lower, var_upper

    return EnsembleAggregate(
        mu_lower=mu_lower,
        mu_upper=mu_upper,
        var_lower=var_lower,
        var_upper=var_upper,
        lower=mu_lower - spread_lower,
        upper=mu_upper + spread_upper,
        m=len(member_intervals),
    )


@dataclass(eq=False)
class Ensemble:
    """Trained members plus everything needed to reproduce them."""

    members: list[NetworkParams]
    seeds: list[int]
    config: TrainConfig
    widening: Widening = Widening.VARIANCE
    standardizer: Standardizer | None = None
    traces: list[TrainTrace] = field(default_factory=list)
    split_seed: int | None = None
    """Seed of the train/test split the members were trained on."""

    train_fraction: float = 0.9

    @property
    def m(self) -> int:
        return len(self.members)

    def aggregate(self, features: ArrayLike) -> EnsembleAggregate:
        return aggregate(
            [network_predict(member, features) for member in self.members],
            self.widening,
        )

    def predict(self, features: ArrayLike) -> Intervals:
        return self.aggregate(features).intervals


def _train_member(
    job: tuple[int, int, Batch, TrainConfig],
) -> tuple[NetworkParams, TrainTrace]:
    member, seed, dataset, config = job
    config = config.model_copy(update={"seed": seed})
    params = init_network(
        dataset.d, config.hidden, seed, bias_offset=config.bias_offset
    )

    return train(params, dataset, config, member=member)


def run_jobs(
    jobs: list[tuple[int, int, Batch, TrainConfig]], workers: int = 1
) -> list[tuple[NetworkParams, TrainTrace]]:
    """Train independent members, in worker processes when workers > 1.

    Results come back in job order regardless of completion order.
    """

    if workers <= 1 or len(jobs) <= 1:
        return [_train_member(job) for job in jobs]

    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_train_member, jobs))


def member_seeds(seed: int, m: int) -> list[int]:
    return [seed + i for i in range(m)]


def train_ensemble(
    dataset: Batch,
    config: TrainConfig,
    m: int = 5,
    seeds: Sequence[int] | None = None,
    workers: int = 1,
    widening: Widening = Widening.VARIANCE,
    standardizer: Standardizer | None = None,
    allow_duplicate_seeds: bool = False,
) -> Ensemble:
    """Train `m` members that differ only in their initialization seed.

    :param seeds: One seed per member; defaults to `config.seed + i`.
    :param allow_duplicate_seeds: Permit repeated seeds (which produce \
        identical members).

    Raises:
        InvalidArgumentError: if `m < 1`, the seed count differs from `m`, \
            or seeds repeat without `allow_duplicate_seeds`.
        DivergenceError: if any member diverges; names the member.
    """

    if m < 1:
        raise InvalidArgumentError("an ensemble needs at least one member")

    seeds = list(seeds) if seeds is not None else member_seeds(config.seed, m)

    if len(seeds) != m:
        raise InvalidArgumentError(f"{len(seeds)} seeds for {m} members")

    if len(set(seeds)) != m and not allow_duplicate_seeds:
        raise InvalidArgumentError(f"member seeds must be distinct: {seeds}")

    logger.info(
        "training %d members with seeds %s on %d workers", m, seeds, workers
    )

    jobs = [(i, seed, dataset, config) for i, seed in enumerate(seeds)]

    try:
        results = run_jobs(jobs, workers)
    except DivergenceError as e:
        logger.error("%s", e.message)
        raise

    return Ensemble(
        members=[params for params, _ in results],
        seeds=seeds,
        config=config,
        widening=widening,
        standardizer=standardizer,
        traces=[trace for _, trace in results],
    )
