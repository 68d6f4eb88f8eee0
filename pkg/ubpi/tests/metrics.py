from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ubpi import losses, metrics
from ubpi.data import Batch
from ubpi.data.standardize import Standardizer
from ubpi.errors import InvalidArgumentError
from ubpi.models.network import Intervals, NetworkParams
from ubpi.schemas.report import EvalReport

import numpy as np
import pytest


def test_picp_hard_examples():
    ys = np.arange(20.0)

    assert metrics.picp_hard(Intervals.of(ys - 1.0, ys + 1.0), ys) == 1.0
    assert metrics.picp_hard(Intervals.of([1.0], [2.0]), [2.0]) == 1.0
    assert metrics.picp_hard(Intervals.of([1.0], [2.0]), [1.0]) == 1.0

    upper = ys + 1.0
    upper[7] = ys[7] - 0.5
    assert metrics.picp_hard(Intervals.of(ys - 1.0, upper), ys) == 0.95


def test_crossed_intervals_cover_nothing():
    intervals = Intervals.of([1.0, 0.0], [0.0, 1.0])

    assert metrics.picp_hard(intervals, [0.5, 0.5]) == 0.5
    assert metrics.crossing_rate(intervals) == 0.5
    assert metrics.mpiw(intervals) == 0.0


def test_measures_reject_empty_and_mismatched_input():
    with pytest.raises(InvalidArgumentError):
        metrics.picp_hard(Intervals.of([], []), [])

    with pytest.raises(InvalidArgumentError):
        metrics.picp_hard(Intervals.of([0.0], [1.0]), [0.0, 1.0])


def test_report_with_raw_scale():
    standardizer = Standardizer(
        feature_mean=np.zeros(1),
        feature_std=np.ones(1),
        target_mean=5.0,
        target_std=2.0,
    )
    report = metrics.report(
        Intervals.of([-1.0, 0.0], [1.0, 1.0]), [0.0, 2.0], standardizer
    )

    assert report.picp_hard == 0.5
    assert report.mpiw == 1.5
    assert report.mpiw_raw == 3.0
    assert report.mse_midpoint == pytest.approx((0.0 + 1.5**2) / 2)
    assert report.mse_raw == pytest.approx(report.mse_midpoint * 4.0)
    assert report.n == 2


def _constant_model(d: int, lower: float, upper: float) -> NetworkParams:
    return NetworkParams(
        w1=np.zeros((d, 3)),
        b1=np.zeros(3),
        w2=np.zeros((3, 2)),
        b2=np.array([lower, upper]),
    )


def test_evaluate_degenerate_wide_model():
    rng = np.random.default_rng(0)
    split = Batch(rng.normal(size=(50, 2)), rng.normal(size=50))
    report = metrics.evaluate(_constant_model(2, -10.0, 10.0), split)

    assert report.picp_hard == 1.0
    assert report.mpiw == 20.0
    assert report.mpiw_raw is None


def test_evaluate_zero_width_at_targets():
    class Exact:
        def predict(self, features):
            return Intervals.of(features[:, 0], features[:, 0])

    ys = np.array([0.5, -1.0, 2.0])
    report = metrics.evaluate(Exact(), Batch(ys.reshape(-1, 1), ys))

    assert report.picp_hard == 1.0
    assert report.mpiw == 0.0
    assert report.crossing_rate == 0.0


def test_evaluate_rejects_non_finite_models():
    params = _constant_model(1, -1.0, 1.0)
    params.w2[0, 0] = np.nan

    with pytest.raises(InvalidArgumentError):
        metrics.evaluate(params, Batch([[0.0]], [0.0]))


def test_mean_report_and_codecs():
    a = EvalReport(
        picp_hard=1.0, mpiw=2.0, mse_midpoint=0.5, crossing_rate=0.0, n=10
    )
    b = EvalReport(
        picp_hard=0.9, mpiw=1.0, mse_midpoint=0.25, crossing_rate=0.1, n=10
    )
    mean = metrics.mean_report([a, b])

    assert mean.picp_hard == pytest.approx(0.95)
    assert mean.mpiw == pytest.approx(1.5)
    assert mean.n == 20
    assert mean.mpiw_raw is None

    assert metrics.csv_header().split(",") == list(metrics.REPORT_COLUMNS)
    assert metrics.to_csv_row(a) == "1.0,2.0,0.5,0.0,10,,"
    assert metrics.to_key_value(a).splitlines()[:2] == [
        "picp_hard=1.0",
        "mpiw=2.0",
    ]

    with pytest.raises(InvalidArgumentError):
        metrics.mean_report([])


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_soft_coverage_approaches_hard_coverage(seed):
    rng = np.random.default_rng(seed)
    lower = rng.normal(size=30)
    upper = lower + rng.uniform(0.0, 2.0, 30)
    ys = rng.normal(size=30)

    # ties on the bounds are where the two measures may disagree
    keep = np.minimum(np.abs(ys - lower), np.abs(ys - upper)) >= 1e-3
    assume(keep.any())
    lower, upper, ys = lower[keep], upper[keep], ys[keep]

    hard = metrics.picp_hard(Intervals.of(lower, upper), ys)
    soft = losses.picp_soft(lower, upper, ys, 1e6).item()

    assert soft == pytest.approx(hard, abs=1e-6)


def test_soft_and_hard_coverage_agree_away_from_bounds():
    for seed in range(500):
        rng = np.random.default_rng(seed)
        ys = rng.normal(size=100)
        near, far = rng.uniform(0.01, 3.0, (2, 100))
        inside = rng.random(100) < 0.9

        lower = np.where(inside, ys - near, ys + near)
        upper = np.where(inside, ys + far, lower + far)

        hard = metrics.picp_hard(Intervals.of(lower, upper), ys)
        soft = losses.picp_soft(lower, upper, ys, 160.0).item()

        assert abs(soft - hard) <= 0.01
