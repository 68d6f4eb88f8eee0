"""Datasets: the `Batch` container, splitting and the ingestion helpers."""

from dataclasses import dataclass

from numpy.typing import ArrayLike, NDArray

from ubpi.errors import DatasetError, InvalidArgumentError

import numpy as np


@dataclass(frozen=True, eq=False)
class Batch:
    """A feature matrix plus its target vector.

    The arrays are copied on construction and marked read-only, so a batch
    can be shared between workers freely.
    """

    features: NDArray[np.float64]
    targets: NDArray[np.float64]
    feature_names: tuple[str, ...] | None = None

    def __init__(
        self,
        features: ArrayLike,
        targets: ArrayLike,
        feature_names: tuple[str, ...] | None = None,
    ) -> None:
        x = np.array(features, dtype=np.float64)
        y = np.array(targets, dtype=np.float64).reshape(-1)

        if x.ndim == 1:
            x = x.reshape(-1, 1)

        if x.ndim != 2:
            raise InvalidArgumentError("features must be a matrix")

        if x.shape[0] != y.shape[0]:
            raise InvalidArgumentError(
                f"{x.shape[0]} feature rows but {y.shape[0]} targets"
            )

        if y.shape[0] < 1:
            raise DatasetError("a batch needs at least one sample")

        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DatasetError("a batch must not contain NaN or Inf")

        x.setflags(write=False)
        y.setflags(write=False)

        object.__setattr__(self, "features", x)
        object.__setattr__(self, "targets", y)
        object.__setattr__(self, "feature_names", feature_names)

    @property
    def n(self) -> int:
        return int(self.targets.shape[0])

    @property
    def d(self) -> int:
        return int(self.features.shape[1])

    def take(self, indices: ArrayLike) -> "Batch":
        """The sub-batch made of the rows at `indices`, in that order."""

        idx = np.asarray(indices, dtype=np.intp)

        return Batch(self.features[idx], self.targets[idx], self.feature_names)

    def __len__(self) -> int:
        return self.n


def split_indices(
    n: int, train_fraction: float = 0.9, seed: int = 0
) -> tuple[NDArray[np.intp], NDArray[np.intp]]:
    """Randomly partition `range(n)` into sorted train and test indices."""

    if not 0.0 < train_fraction < 1.0:
        raise InvalidArgumentError(
            f"train fraction must be in (0, 1), got {train_fraction}"
        )

    if n < 2:
        raise InvalidArgumentError("splitting needs at least two samples")

    n_train = min(max(int(round(n * train_fraction)), 1), n - 1)
    permutation = np.random.default_rng(seed).permutation(n)

    return np.sort(permutation[:n_train]), np.sort(permutation[n_train:])


def split(
    batch: Batch, train_fraction: float = 0.9, seed: int = 0
) -> tuple[Batch, Batch]:
    """Split a batch into disjoint train and test batches.

    Rows keep their original relative order inside each split.
    """

    train, test = split_indices(batch.n, train_fraction, seed)

    return batch.take(train), batch.take(test)
