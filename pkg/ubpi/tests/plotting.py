from ubpi.plotting import plot_intervals, plot_toy

import numpy as np


def test_interval_figure_is_deterministic(tmp_path):
    y = np.linspace(0.0, 1.0, 50)
    args = (y, y - 0.2, y + 0.3)

    first = plot_intervals(tmp_path / "a.svg", *args, start=10)
    second = plot_intervals(tmp_path / "b.svg", *args, start=10)

    text = first.read_text()
    assert text.startswith("<?xml")
    assert "<svg" in text
    assert first.read_bytes() == second.read_bytes()


def test_toy_figure(tmp_path):
    x = np.array([-1.0, 0.0, 1.0])
    grid = np.linspace(-2.0, 2.0, 20)
    path = plot_toy(
        tmp_path / "toy.svg",
        x,
        x**2,
        grid,
        grid**2 - 1.0,
        grid**2 + 1.0,
        title="parabola",
    )

    assert "parabola" in path.read_text()
