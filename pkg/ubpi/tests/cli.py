from pathlib import Path

from typer.testing import CliRunner

from ubpi import app
from ubpi.commands.common import build_config
from ubpi.configuration import Configuration
from ubpi.schemas.loss import LossConfig
from ubpi.schemas.train import TrainConfig

import json


FAST = ["--epochs", "2", "--ensemble", "2"]


def _train(
    runner: CliRunner, assets: Path, out: Path, *extra: str
) -> Path:
    result = runner.invoke(
        app,
        [
            "train",
            str(assets / "linear.env"),
            *FAST,
            "--batch",
            "27",
            "--out",
            str(out),
            *extra,
        ],
    )
    assert result.exit_code == 0, result.output

    return out / "train-linear"


def test_toy_wave(runner, configuration_fixture: Configuration):
    result = runner.invoke(
        app, ["toy", "wave", "--pc", "0.95", "--n", "40", *FAST]
    )
    assert result.exit_code == 0, result.output

    directory = Path(configuration_fixture.output_directory) / "toy-wave"

    for name in ("intervals.svg", "points.csv", "bounds.csv", "report.txt"):
        assert (directory / name).is_file()

    header = (directory / "report.csv").read_text().splitlines()[0]
    assert header.startswith("picp_hard,mpiw")
    assert len((directory / "points.csv").read_text().splitlines()) == 41
    assert (directory / "trace_member_1.csv").is_file()
    assert (directory / "ensemble" / "manifest.json").is_file()


def test_toy_heteroscedastic_with_gap(runner, configuration_fixture):
    result = runner.invoke(
        app,
        ["toy", "heteroscedastic", "--gap", "-1:1", "--n", "40", *FAST],
    )
    assert result.exit_code == 0, result.output

    directory = (
        Path(configuration_fixture.output_directory) / "toy-heteroscedastic"
    )
    summary = (directory / "epistemic.txt").read_text()

    assert "mean_variance_inside=" in summary
    assert "mean_variance_outside=" in summary


def test_toy_usage_errors(runner, configuration_fixture):
    assert runner.invoke(app, ["toy", "sine"]).exit_code == 2
    assert runner.invoke(app, ["toy", "wave", "--gap", "-1:1"]).exit_code == 2
    assert (
        runner.invoke(
            app, ["toy", "heteroscedastic", "--gap", "1:-1"]
        ).exit_code
        == 2
    )
    assert runner.invoke(app, ["toy", "wave", "--pc", "1.5"]).exit_code == 2


def test_train_writes_snapshot_and_report(
    runner, assets, tmp_path, configuration_fixture
):
    directory = _train(runner, assets, tmp_path)

    report = dict(
        line.split("=", 1)
        for line in (directory / "report.txt").read_text().splitlines()
    )
    assert {"picp_hard", "mpiw", "mpiw_raw"} <= set(report)

    manifest = json.loads(
        (directory / "run_0" / "ensemble" / "manifest.json").read_text()
    )
    assert manifest["m"] == 2
    assert manifest["split_seed"] == 0
    assert manifest["config"]["hidden"] == 50

    runs = (directory / "runs.csv").read_text().splitlines()
    assert runs[0].startswith("run,picp_hard")
    assert runs[-1].startswith("mean,")


def test_train_with_repeats_and_config(
    runner, assets, tmp_path, configuration_fixture
):
    result = runner.invoke(
        app,
        [
            "train",
            str(assets / "linear.env"),
            "--config",
            str(assets / "experiment.env"),
            "--ensemble",
            "1",
            "--repeats",
            "2",
            "--loss",
            "pinball",
            "--out",
            str(tmp_path),
        ],
    )
    assert result.exit_code == 0, result.output

    directory = tmp_path / "train-linear"
    manifest = json.loads(
        (directory / "run_1" / "ensemble" / "manifest.json").read_text()
    )

    assert manifest["config"]["loss_kind"] == "pinball"
    assert manifest["config"]["epochs"] == 5
    assert manifest["split_seed"] == 1
    assert len((directory / "runs.csv").read_text().splitlines()) == 4


def test_train_missing_target(runner, assets, configuration_fixture):
    result = runner.invoke(
        app, ["train", str(assets / "missing_target.env"), *FAST]
    )

    assert result.exit_code == 1
    assert "price" in result.output


def test_train_missing_profile(runner, tmp_path, configuration_fixture):
    result = runner.invoke(app, ["train", str(tmp_path / "nothing.env")])

    assert result.exit_code == 1


def test_sweep(runner, assets, tmp_path, configuration_fixture):
    result = runner.invoke(
        app,
        [
            "sweep",
            str(assets / "linear.env"),
            "--lambdas",
            "5,60",
            "--batch",
            "27",
            "--out",
            str(tmp_path),
            *FAST,
        ],
    )
    assert result.exit_code == 0, result.output

    rows = (tmp_path / "sweep-linear" / "sweep.csv").read_text().splitlines()
    assert rows[0] == "lambda,picp,mpiw"
    assert [row.split(",")[0] for row in rows[1:]] == ["5.0", "60.0"]

    table = (tmp_path / "sweep-linear" / "sweep.txt").read_text()
    assert len(table.splitlines()) == 4


def test_sweep_usage_errors(runner, assets, configuration_fixture):
    profile = str(assets / "linear.env")

    assert (
        runner.invoke(app, ["sweep", profile, "--lambdas", "5,x"]).exit_code
        == 2
    )
    assert (
        runner.invoke(app, ["sweep", profile, "--lambdas", "5"]).exit_code
        == 2
    )


def test_compare(runner, assets, tmp_path, configuration_fixture):
    result = runner.invoke(
        app,
        [
            "compare",
            str(assets / "linear.env"),
            "--methods",
            "ubpi,mbpep",
            "--batch",
            "27",
            "--out",
            str(tmp_path),
            *FAST,
        ],
    )
    assert result.exit_code == 0, result.output

    table = (tmp_path / "compare-linear" / "compare.txt").read_text()
    assert table.count("*") == 1

    rows = (tmp_path / "compare-linear" / "compare.csv").read_text()
    assert rows.splitlines()[0] == "method,picp,mpiw,best"

    assert (
        runner.invoke(
            app, ["compare", str(assets / "linear.env"), "--methods", "svm"]
        ).exit_code
        == 2
    )


def test_plot_is_reproducible(
    runner, assets, tmp_path, configuration_fixture
):
    snapshot = _train(runner, assets, tmp_path / "trained") / "run_0"
    profile = str(assets / "linear.env")

    def plot(out: Path, *window: str) -> int:
        return runner.invoke(
            app,
            [
                "plot",
                str(snapshot / "ensemble"),
                profile,
                *window,
                "--out",
                str(out),
            ],
        ).exit_code

    assert plot(tmp_path / "a", "--stop", "12") == 0
    assert plot(tmp_path / "b", "--stop", "12") == 0

    first = tmp_path / "a" / "plot-linear" / "intervals.svg"
    second = tmp_path / "b" / "plot-linear" / "intervals.svg"
    assert first.read_bytes() == second.read_bytes()

    # the test split holds 12 of the 120 rows
    assert plot(tmp_path / "c") == 2
    assert plot(tmp_path / "c", "--start", "5", "--stop", "5") == 2


def test_plot_missing_snapshot(
    runner, assets, tmp_path, configuration_fixture
):
    result = runner.invoke(
        app, ["plot", str(tmp_path / "nothing"), str(assets / "linear.env")]
    )

    assert result.exit_code == 1


def test_flags_override_file_which_overrides_profile(tmp_path):
    path = tmp_path / "short.env"
    path.write_text("epochs=5\nbatch=8\n")

    config = build_config(
        base=TrainConfig(hidden=100),
        config_file=path,
        flags={"batch": 4, "lambda": None},
    )

    assert config.hidden == 100
    assert config.epochs == 5
    assert config.batch_size == 4
    assert config.loss.lambda_ == LossConfig().lambda_
