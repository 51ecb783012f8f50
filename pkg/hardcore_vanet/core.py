#  Copyright 2025 Shoji Kumagai
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.

import logging
from pathlib import Path
from typing import Any, Optional

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.theme import Theme
from rich.traceback import Traceback

from . import __version__
from .constants import DEFAULT_DROP_FIRST
from .errors import ConfigurationError, HardcoreVanetError, NumericError
from .status import ExitStatus
from .termui import DEFAULT_THEME, UI


def _configure_logging(debug: bool, verbose: int) -> None:
    level = logging.DEBUG if debug or verbose >= 2 else logging.INFO if verbose == 1 else logging.WARNING
    logger = logging.getLogger("hardcore_vanet")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = RichHandler(console=Console(stderr=True), show_path=debug, rich_tracebacks=debug)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level)


class HcvanetGroup(click.Group):
    """Maps package errors onto exit codes: bad input 1, numeric failure 2."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            result = super().invoke(ctx)
        except click.UsageError as e:
            e.show()
            ctx.exit(ExitStatus.ERROR)
        except NumericError as e:
            self._report(ctx, e)
            ctx.exit(ExitStatus.ERROR_NUMERIC)
        except (HardcoreVanetError, ValueError, OSError) as e:
            self._report(ctx, e)
            ctx.exit(ExitStatus.ERROR)
        if isinstance(result, ExitStatus) and result is not ExitStatus.SUCCESS:
            ctx.exit(result)
        return result

    @staticmethod
    def _report(ctx: click.Context, error: Exception) -> None:
        app = ctx.obj
        ui = app.ui if app is not None else UI()
        ui.error(str(error))
        if app is not None and app.debug:
            ui.echo(Traceback.from_exception(type(error), error, error.__traceback__), err=True)


RADIO_OPTIONS = [
    click.option("--eta", type=float, default=None, help="pathloss exponent η > 1"),
    click.option("--xi", type=float, default=None, help="activity probability ξ"),
    click.option("--g", "g", type=float, default=None, help="backlobe attenuation g"),
    click.option("--ell", type=float, default=None, help="inter-lane spacing ℓ [m]"),
    click.option("--phi", type=float, default=None, help="antenna beamwidth φ [rad]"),
    click.option("--theta-db", default=None, help="threshold grid lo:hi:n in dB"),
    click.option("--link-lane", type=int, default=None, help="index of the lane carrying the link"),
]


def radio_options(f: Any) -> Any:
    for option in reversed(RADIO_OPTIONS):
        f = option(f)
    return f


drop_first_option = click.option(
    "--drop-first",
    type=click.IntRange(min=0),
    default=DEFAULT_DROP_FIRST,
    show_default=True,
    help="warm-up snapshots of the trace to discard",
)


@click.group(cls=HcvanetGroup)
@click.option("--debug/--no-debug", default=False)
@click.option("-v", "--verbose", count=True, help="more log output, repeatable")
@click.option("-q", "--quiet", is_flag=True, default=False)
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None, help="user config file")
@click.option("-o", "--output-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.version_option(__version__, prog_name="hcvanet")
@click.pass_context
def cli(
    ctx: click.Context,
    debug: bool,
    verbose: int,
    quiet: bool,
    config_path: Optional[Path],
    output_dir: Optional[Path],
) -> None:
    from .commands._common import AppContext
    from .models.config import ConfigJson, load_config
    from .paths import HCVANET_CONFIG_JSON

    ui = UI()
    ui.set_theme(Theme(DEFAULT_THEME))
    ui.set_verbosity(-1 if quiet else verbose)
    _configure_logging(debug, verbose)
    config_path = config_path or HCVANET_CONFIG_JSON
    try:
        config = load_config(config_path)
    except ConfigurationError:
        # doctor reports a broken config file itself
        if ctx.invoked_subcommand != "doctor":
            raise
        config = ConfigJson()
    if output_dir is not None:
        config.output.directory = str(output_dir)
    ctx.obj = AppContext(ui=ui, config=config, debug=debug, config_path=config_path)


@cli.command("gen-traces")
@click.option("--lanes", default="0.0248:7.10,0.0218:11.05,0.0205:14.82", show_default=True, help="λ:c per lane")
@click.option("--snapshots", type=int, default=1200, show_default=True)
@click.option("--length-km", type=float, default=10.0, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--name", default="synthetic", show_default=True)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
def gen_traces(app: Any, **kwargs: Any) -> None:
    """Generate a synthetic multi-lane trace."""
    from .commands import gen_traces

    gen_traces.run(app, **kwargs)


@cli.command()
@click.argument("trace_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--method", type=click.Choice(["all", "ppp", "mom", "mle", "lsq", "lsq-fixed"]), default="all", show_default=True)
@click.option("--snapshot", type=int, default=None, help="one snapshot instead of all of them")
@click.option("--lane", "lanes", type=int, multiple=True, help="lane ids, all by default")
@click.option("--window-margin", type=float, default=0.0, show_default=True)
@drop_first_option
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
def fit(app: Any, **kwargs: Any) -> None:
    """Estimate lane parameters from a trace."""
    from .commands import fit

    fit.run(app, **kwargs)


@cli.command()
@click.option("--model", default=None, help="λ:c closed forms")
@click.option("--trace", "trace_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--statistic", "statistics", type=click.Choice(["J", "K", "L", "G", "F", "PCF"], case_sensitive=False), multiple=True, default=("J", "L"), show_default=True)
@click.option("--r-max", type=float, default=None)
@click.option("--snapshot", type=int, default=None)
@click.option("--lane", type=int, default=0, show_default=True)
@click.option("--window-margin", type=float, default=None, help="defaults to r_max")
@click.option("--envelope", "envelope_runs", type=int, default=0, show_default=True, help="realizations in the J/L envelope")
@click.option("--length-km", type=float, default=10.0, show_default=True)
@drop_first_option
@click.option("--seed", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
@click.pass_obj
def stats(app: Any, **kwargs: Any) -> None:
    """Summary statistics of a model or a trace."""
    from .commands import stats

    stats.run(app, **kwargs)


@cli.command()
@click.option("--lanes", default=None, help="λ:c per lane")
@click.option("--fits", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--method", type=click.Choice(["mom", "mle", "lsq", "lsq-fixed"]), default="lsq", show_default=True)
@radio_options
@click.option("--ppp/--no-ppp", default=True, show_default=True, help="also the PPP prediction")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
@click.pass_obj
def outage(app: Any, **kwargs: Any) -> None:
    """Analytic outage probability curves."""
    from .commands import outage

    outage.run(app, **kwargs)


@cli.command()
@click.option("--lanes", default=None, help="λ:c per lane")
@click.option("--trace", "trace_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--runs", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=None)
@click.option("--roadway-km", type=float, default=None, help="extent on each side of the receiver")
@drop_first_option
@radio_options
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
@click.pass_obj
def simulate(app: Any, **kwargs: Any) -> None:
    """Monte-Carlo outage probability."""
    from .commands import simulate

    simulate.run(app, **kwargs)


@cli.command()
@click.argument("curve_a", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("curve_b", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_obj
def gof(app: Any, curve_a: Path, curve_b: Path) -> None:
    """Kolmogorov-Smirnov distance between two outage curves."""
    from .commands import gof

    gof.run(app, curve_a, curve_b)


@cli.command("replicate-paper")
@click.option("--scale", type=click.FloatRange(min=0.0, min_open=True, max=1.0), default=0.01, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option(
    "--only",
    type=click.Choice(["summary", "moments", "ppp", "own-lane", "other-lane", "multilane", "estimators", "special", "invariants"]),
    multiple=True,
    help="run only these checks",
)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
def replicate_paper(app: Any, **kwargs: Any) -> ExitStatus:
    """Reduced-size replication suite with a JSON report."""
    from .commands import replicate

    return replicate.run(app, **kwargs)


@cli.command()
@click.pass_obj
def doctor(app: Any) -> ExitStatus:
    """Check the numeric stack, config file and output directory."""
    from .commands import doctor

    return doctor.run(app)


def main() -> int:
    try:
        result = cli.main(prog_name="hcvanet", standalone_mode=False)
    except (KeyboardInterrupt, click.exceptions.Abort):
        return ExitStatus.ERROR_CTRL_C.value
    except click.ClickException as e:
        e.show()
        return ExitStatus.ERROR.value
    return int(result) if isinstance(result, int) else ExitStatus.SUCCESS.value
