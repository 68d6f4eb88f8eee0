from dataclasses import dataclass

from numpy.typing import ArrayLike, NDArray

from ubpi.data import Batch
from ubpi.errors import DatasetError

import numpy as np


@dataclass(frozen=True, eq=False)
class Standardizer:
    """Per-column affine map to zero mean and unit variance.

    Always fitted on the training split only.
    """

    feature_mean: NDArray[np.float64]
    feature_std: NDArray[np.float64]
    target_mean: float
    target_std: float

    @classmethod
    def fit(cls, train: Batch) -> "Standardizer":
        """Fit the standardizer on a training batch.

        Raises:
            DatasetError: if a feature or the target is constant on the \
                training split; such a column should be dropped in the \
                dataset profile.
        """

        feature_mean = train.features.mean(axis=0)
        feature_std = train.features.std(axis=0)

        for i, std in enumerate(feature_std):
            if not std > 0.0:
                name = train.feature_names[i] if train.feature_names else i

                raise DatasetError(
                    "feature is constant on the training split; drop it in "
                    "the dataset profile",
                    column=name,
                )

        target_std = float(train.targets.std())

        if not target_std > 0.0:
            raise DatasetError("target is constant on the training split")

        return cls(
            feature_mean=feature_mean,
            feature_std=feature_std,
            target_mean=float(train.targets.mean()),
            target_std=target_std,
        )

    def apply(self, batch: Batch) -> Batch:
        return Batch(
            self.apply_features(batch.features),
            self.apply_targets(batch.targets),
            batch.feature_names,
        )

    def apply_features(self, features: ArrayLike) -> NDArray[np.float64]:
        return (np.asarray(features) - self.feature_mean) / self.feature_std

    def apply_targets(self, targets: ArrayLike) -> NDArray[np.float64]:
        return (np.asarray(targets) - self.target_mean) / self.target_std

    def invert_targets(self, targets: ArrayLike) -> NDArray[np.float64]:
        return np.asarray(targets) * self.target_std + self.target_mean

    def invert_features(self, features: ArrayLike) -> NDArray[np.float64]:
        return np.asarray(features) * self.feature_std + self.feature_mean

    def invert(self, batch: Batch) -> Batch:
        return Batch(
            self.invert_features(batch.features),
            self.invert_targets(batch.targets),
            batch.feature_names,
        )

    def scale_width(self, width: ArrayLike) -> NDArray[np.float64]:
        """Widths are translation invariant: only the scale applies."""

        return np.asarray(width) * self.target_std
