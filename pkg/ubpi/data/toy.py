"""The two one-dimensional toy problems.

Inputs are drawn uniformly over a default range that callers may override.
"""

from enum import unique

from ubpi._compat import StrEnum

from numpy.typing import ArrayLike, NDArray

from ubpi.data import Batch
from ubpi.errors import InvalidArgumentError

import numpy as np


WAVE_RANGE = (-5.0, 5.0)
HETEROSCEDASTIC_RANGE = (-3.0, 3.0)
WAVE_NOISE = 0.1


@unique
class NoiseReading(StrEnum):
    """How the 0.1 in the wave noise N(0, 0.1) is read."""

    VARIANCE = "variance"
    STD = "std"


def wave_mean(x: ArrayLike) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=np.float64)

    return (
        2.0 * np.cos(0.2 * x)
        + 0.2 * np.cos(10.0 * x)
        + 0.7 * np.cos(20.0 * x)
    )


def heteroscedastic_mean(x: ArrayLike) -> NDArray[np.float64]:
    return 1.5 * np.sin(np.asarray(x, dtype=np.float64))


def _check_range(n: int, x_range: tuple[float, float]) -> None:
    if n < 1:
        raise InvalidArgumentError("at least one sample must be generated")

    if not x_range[0] < x_range[1]:
        raise InvalidArgumentError(f"empty input range {x_range}")


def toy_wave(
    n: int = 100,
    seed: int = 0,
    x_range: tuple[float, float] = WAVE_RANGE,
    noise: NoiseReading = NoiseReading.VARIANCE,
) -> Batch:
    """y = 2cos(0.2x) + 0.2cos(10x) + 0.7cos(20x) + e with e ~ N(0, 0.1)."""

    _check_range(n, x_range)

    if noise == NoiseReading.VARIANCE:
        std = float(np.sqrt(WAVE_NOISE))
    else:
        std = WAVE_NOISE

    rng = np.random.default_rng(seed)
    x = rng.uniform(x_range[0], x_range[1], n)
    y = wave_mean(x) + rng.normal(0.0, std, n)

    return Batch(x.reshape(-1, 1), y, ("x",))


def _uniform_outside_gap(
    rng: np.random.Generator,
    n: int,
    x_range: tuple[float, float],
    gap: tuple[float, float],
) -> NDArray[np.float64]:
    lo, hi = x_range
    gap_lo, gap_hi = max(gap[0], lo), min(gap[1], hi)

    if gap_lo >= gap_hi:
        # the gap misses the range entirely
        return rng.uniform(lo, hi, n)

    left = gap_lo - lo
    right = hi - gap_hi

    if left <= 0.0 and right <= 0.0:
        raise InvalidArgumentError(
            f"gap {gap} covers the whole input range {x_range}"
        )

    u = rng.uniform(0.0, left + right, n)
    x = np.where(u < left, lo + u, gap_hi + (u - left))

    # the half-open draw can land exactly on gap_hi; nudge it out
    inside = (x >= gap[0]) & (x <= gap[1])

    return np.where(inside, np.nextafter(gap_hi, hi), x)


def toy_heteroscedastic(
    n: int = 100,
    seed: int = 0,
    x_range: tuple[float, float] = HETEROSCEDASTIC_RANGE,
    gap: tuple[float, float] | None = None,
) -> Batch:
    """y = 1.5sin(x) + e with e ~ N(0, x^2).

    :param gap: An optional closed interval from which no input is drawn, \
        leaving a sparse region in the middle of the data.
    """

    _check_range(n, x_range)
    rng = np.random.default_rng(seed)

    if gap is None:
        x = rng.uniform(x_range[0], x_range[1], n)
    else:
        if not gap[0] < gap[1]:
            raise InvalidArgumentError(f"empty gap {gap}")

        x = _uniform_outside_gap(rng, n, x_range, gap)

    y = heteroscedastic_mean(x) + rng.normal(0.0, 1.0, n) * np.abs(x)

    return Batch(x.reshape(-1, 1), y, ("x",))
