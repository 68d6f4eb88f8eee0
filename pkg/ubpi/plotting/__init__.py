"""SVG figures of prediction intervals.

Figures are rendered with matplotlib's Agg backend into SVG. The hash salt
is fixed and the date metadata dropped so identical inputs give identical
bytes.
"""

from pathlib import Path

from numpy.typing import ArrayLike

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


_STYLE = {
    "svg.hashsalt": "ubpi",
    "svg.fonttype": "none",
    "path.simplify": False,
}


def _save(figure: plt.Figure, path: str | Path) -> Path:
    path = Path(path)
    figure.savefig(path, format="svg", metadata={"Date": None})
    plt.close(figure)

    return path


def plot_toy(
    path: str | Path,
    x: ArrayLike,
    y: ArrayLike,
    grid: ArrayLike,
    lower: ArrayLike,
    upper: ArrayLike,
    title: str = "",
) -> Path:
    """Training points over the shaded interval band on a dense grid."""

    grid = np.asarray(grid, dtype=np.float64)
    order = np.argsort(grid)

    with plt.rc_context(_STYLE):
        figure, axes = plt.subplots(figsize=(7.0, 4.0))
        axes.fill_between(
            grid[order],
            np.asarray(lower)[order],
            np.asarray(upper)[order],
            color="0.8",
            label="prediction interval",
        )
        axes.scatter(x, y, s=8, color="red", label="training data")
        axes.set_xlabel("x")
        axes.set_ylabel("y")

        if title:
            axes.set_title(title)

        axes.legend(loc="upper right")

        return _save(figure, path)


def plot_intervals(
    path: str | Path,
    y: ArrayLike,
    lower: ArrayLike,
    upper: ArrayLike,
    start: int = 0,
) -> Path:
    """Test targets as points with upper (red) and lower (green) polylines.

    :param start: Index of the first sample, used for the x axis labels.
    """

    y = np.asarray(y, dtype=np.float64)
    index = np.arange(start, start + y.shape[0])

    with plt.rc_context(_STYLE):
        figure, axes = plt.subplots(figsize=(8.0, 4.0))
        axes.plot(index, upper, color="red", linewidth=1.0, label="upper")
        axes.plot(index, lower, color="green", linewidth=1.0, label="lower")
        axes.scatter(index, y, s=10, color="blue", label="target")
        axes.set_xlabel("test sample")
        axes.set_ylabel("y")
        axes.legend(loc="upper right")

        return _save(figure, path)
