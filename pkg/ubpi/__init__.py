from typing import Annotated

from rich.logging import RichHandler

from ubpi.commands import compare, plot, sweep, toy, train

import logging
import typer


app = typer.Typer(
    name="ubpi",
    help="Prediction intervals from deep ensembles of two-headed networks.",
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)


@app.callback()
def setup(
    verbose: Annotated[
        bool, typer.Option("--verbose", "-v", help="Log at debug level.")
    ] = False,
) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=True)],
        force=True,
    )


app.command("toy")(toy.toy)
app.command("train")(train.train)
app.command("sweep")(sweep.sweep)
app.command("compare")(compare.compare)
app.command("plot")(plot.plot)


def main() -> None:
    app()
