# capwave_core/cli.py
"""Command-line interface for capwave-paths, using Typer."""

import sys
import traceback
import warnings
from pathlib import Path
from typing import Any, Dict, List, NoReturn, Optional, Union

import click
import typer
try:
    from typing import Annotated
except ImportError:
    from typing_extensions import Annotated

from .config import __version__, TOOL_NAME, CONFIG_FILENAME, EQUAL_CURRENT, DEFAULT_DELTA, DEFAULT_WEBER, DEFAULT_WORKERS
from .config import RunConfig, find_project_root, load_config, load_config_file
from .errors import CapwaveError, ConfigurationError, EXIT_INVALID_INPUT, EXIT_NUMERICAL_FAILURE, exit_code_for
from .running import run_dispersion, run_field, run_trajectory
from .serialization import rows_to_csv, write_rows, write_summary
from .sweeping import run_sweep
from .verification import run_verify
from .wave_model import WaveParameters, resolve_current

app = typer.Typer(
    name="capwave",
    help="capwave-paths: particle trajectories beneath linear capillary-gravity waves.",
    add_completion=False,
    no_args_is_help=True
)

class GlobalContext:
    def __init__(self, verbose: bool, config_path: Optional[Path] = None):
        self.verbose = verbose
        self.config_path = config_path

def _version_callback(value: bool):
    if value:
        typer.echo(f"{TOOL_NAME} version {__version__}")
        raise typer.Exit()

@app.callback()
def common_options(
    ctx: typer.Context,
    verbose: Annotated[bool, typer.Option("-v", "--verbose", help="Enable detailed verbose output.")] = False,
    config: Annotated[Optional[Path], typer.Option("--config", help=f"Read settings from this file instead of the nearest '{CONFIG_FILENAME}'.", show_default=False)] = None,
    version: Annotated[Optional[bool], typer.Option("--version", callback=_version_callback, is_eager=True, help="Show version and exit.")] = None,
):
    ctx.obj = GlobalContext(verbose=verbose, config_path=config)

def _fail(exc: BaseException, common_ctx: GlobalContext) -> NoReturn:
    typer.secho(f"Error: {exc}", fg=typer.colors.RED, err=True)
    if common_ctx.verbose: traceback.print_exc()
    raise typer.Exit(code=exit_code_for(exc))

def resolve_config(common_ctx: GlobalContext) -> Dict[str, Any]:
    """Settings from --config, else from the nearest capwave.toml above the working directory."""
    if common_ctx.config_path is not None:
        if not common_ctx.config_path.is_file():
            typer.secho(f"Error: Config file '{common_ctx.config_path}' not found.", fg=typer.colors.RED, err=True)
            raise typer.Exit(code=EXIT_INVALID_INPUT)
        if common_ctx.verbose: print(f"[Config] Using '{common_ctx.config_path}'")
        return load_config_file(common_ctx.config_path)
    project_root = find_project_root(Path.cwd())
    if project_root:
        if common_ctx.verbose: print(f"[Config] Using '{CONFIG_FILENAME}' from '{project_root}'")
        return load_config(project_root)
    if common_ctx.verbose: print(f"[Config] No '{CONFIG_FILENAME}' found, using defaults.")
    return {}

def _parse_c0(text: Optional[str]) -> Union[float, str, None]:
    if text is None or text == EQUAL_CURRENT:
        return text
    try:
        return float(text)
    except ValueError:
        raise ConfigurationError(f"--c0 must be a number or '{EQUAL_CURRENT}', got '{text}'.")

def _emit_warnings(caught: List[warnings.WarningMessage]):
    for w in caught:
        typer.secho(f"Warning: {w.message}", fg=typer.colors.YELLOW, err=True)

def _float_list(values: Optional[List[float]], config: Dict[str, Any], list_key: str, scalar_key: str, default: float) -> List[float]:
    if values:
        return list(values)
    if list_key in config:
        return [float(v) for v in config[list_key]]
    return [float(config.get(scalar_key, default))]


@app.command("dispersion")
def dispersion_command(
    ctx: typer.Context,
    delta: Annotated[Optional[List[float]], typer.Option("--delta", help="Shallowness h0/lambda; repeat for a grid.", show_default=False)] = None,
    weber: Annotated[Optional[List[float]], typer.Option("--weber", help="Weber number; repeat for a grid.", show_default=False)] = None,
    out: Annotated[Optional[Path], typer.Option("-o", "--out", help="Write the table to this CSV file instead of stdout.", show_default=False)] = None,
):
    """Tabulate the linear phase speed c over a (delta, weber) grid."""
    common_ctx: GlobalContext = ctx.obj
    config = resolve_config(common_ctx)
    try:
        deltas = _float_list(delta, config, "sweep_deltas", "delta", DEFAULT_DELTA)
        webers = _float_list(weber, config, "sweep_webers", "weber", DEFAULT_WEBER)
        rows = run_dispersion(deltas, webers)
        if out:
            write_rows(("delta", "weber", "c", "c_squared"), rows, out)
            typer.secho(f"Wrote {len(rows)} rows to '{out}'.", fg=typer.colors.GREEN)
        else:
            typer.echo(rows_to_csv(("delta", "weber", "c", "c_squared"), rows), nl=False)
    except (CapwaveError, OSError) as e:
        _fail(e, common_ctx)


@app.command("field")
def field_command(
    ctx: typer.Context,
    delta: Annotated[Optional[float], typer.Option("--delta", help="Shallowness h0/lambda.", show_default=False)] = None,
    weber: Annotated[Optional[float], typer.Option("--weber", help="Weber number.", show_default=False)] = None,
    c0: Annotated[Optional[str], typer.Option("--c0", help=f"Current strength, or '{EQUAL_CURRENT}' for c0 = c.", show_default=False)] = None,
    t: Annotated[float, typer.Option("--t", help="Time of the snapshot.")] = 0.0,
    nx: Annotated[int, typer.Option("--nx", help="Grid points over one wavelength.")] = 21,
    nz: Annotated[int, typer.Option("--nz", help="Grid points over the depth.")] = 11,
    out: Annotated[Optional[Path], typer.Option("-o", "--out", help="Write the samples to this CSV file instead of stdout.", show_default=False)] = None,
):
    """Sample eta, u, v and p of the linear field on an x-z grid."""
    common_ctx: GlobalContext = ctx.obj
    config = resolve_config(common_ctx)
    try:
        base = RunConfig.from_mapping(config).merged({"delta": delta, "weber": weber, "c0": _parse_c0(c0)})
        wp = WaveParameters(delta=base.delta, weber=base.weber, c0=resolve_current(base.c0, base.delta, base.weber))
        rows = run_field(wp, t, nx, nz)
        columns = ("x", "z", "eta", "u", "v", "p")
        if out:
            write_rows(columns, rows, out)
            typer.secho(f"Wrote {len(rows)} samples to '{out}'.", fg=typer.colors.GREEN)
        else:
            typer.echo(rows_to_csv(columns, rows), nl=False)
    except (CapwaveError, OSError) as e:
        _fail(e, common_ctx)


@app.command("trajectory")
def trajectory_command(
    ctx: typer.Context,
    delta: Annotated[Optional[float], typer.Option("--delta", help="Shallowness h0/lambda.", show_default=False)] = None,
    weber: Annotated[Optional[float], typer.Option("--weber", help="Weber number.", show_default=False)] = None,
    c0: Annotated[Optional[str], typer.Option("--c0", help=f"Current strength, or '{EQUAL_CURRENT}' for c0 = c.", show_default=False)] = None,
    x0: Annotated[Optional[float], typer.Option("--x0", help="Initial horizontal position.", show_default=False)] = None,
    z0: Annotated[Optional[float], typer.Option("--z0", help="Initial height, 0 (bed) to 1 (surface).", show_default=False)] = None,
    t_end: Annotated[Optional[float], typer.Option("--t-end", help="End of the time window.", show_default=False)] = None,
    dt_out: Annotated[Optional[float], typer.Option("--dt-out", help="Spacing of output times.", show_default=False)] = None,
    method: Annotated[Optional[str], typer.Option("--method", help="exact, numeric or both.", show_default=False)] = None,
    output_format: Annotated[Optional[str], typer.Option("--format", help="csv or json.", show_default=False)] = None,
    out: Annotated[Optional[str], typer.Option("-o", "--out", help="Output path stem.", show_default=False)] = None,
    tol: Annotated[Optional[float], typer.Option("--tol", help="Relative tolerance of the integrator.", show_default=False)] = None,
    fallback: Annotated[Optional[bool], typer.Option("--fallback/--no-fallback", help="Integrate numerically where no closed form applies.", show_default=False)] = None,
    plot_data: Annotated[Optional[bool], typer.Option("--plot-data/--no-plot-data", help="Also write two-column (x z) .dat files.", show_default=False)] = None,
):
    """Compute one particle path and write it to disk."""
    common_ctx: GlobalContext = ctx.obj
    config = resolve_config(common_ctx)
    try:
        overrides = {
            "delta": delta, "weber": weber, "c0": _parse_c0(c0), "x0": x0, "z0": z0, "t_end": t_end,
            "dt_out": dt_out, "method": method, "output_format": output_format, "out": out, "rel_tol": tol,
            "fallback": fallback, "plot_data": plot_data,
        }
        run_config = RunConfig.from_mapping(config).merged(overrides)
        if common_ctx.verbose: typer.echo(f"[Run] {run_config}")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            run = run_trajectory(run_config, common_ctx.verbose)
        _emit_warnings(caught)
    except (CapwaveError, OSError) as e:
        _fail(e, common_ctx)

    for tag, traj in run.trajectories.items():
        typer.echo(f"{tag}: {len(traj)} samples ({traj.meta.method.value})")
        for event in traj.meta.events:
            typer.echo(f"  - {event}")
    for path in run.files:
        typer.echo(f"Wrote '{path}'")
    if run.max_difference is not None:
        typer.echo(f"Largest exact/numeric difference: {run.max_difference:.3e}")
    typer.secho("Trajectory run successful.", fg=typer.colors.GREEN)


@app.command("verify")
def verify_command(
    ctx: typer.Context,
    report: Annotated[Optional[Path], typer.Option("--report", help="Write the JSON report to this file.", show_default=False)] = None,
    only: Annotated[Optional[List[str]], typer.Option("--only", help="Run only the named check; repeatable.", show_default=False)] = None,
):
    """Run the identity, residual and oracle checks."""
    common_ctx: GlobalContext = ctx.obj
    try:
        result = run_verify(only=only or None, verbose=common_ctx.verbose)
    except KeyError as e:
        typer.secho(f"Error: {e.args[0]}", fg=typer.colors.RED, err=True)
        raise typer.Exit(code=EXIT_INVALID_INPUT)
    for check in result.checks:
        colour = typer.colors.GREEN if check.passed else typer.colors.RED
        typer.secho(f"{'PASS' if check.passed else 'FAIL'}  {check.name:<26} {check.residual:.3e} (tol {check.tolerance:.0e})", fg=colour)
    if report:
        try:
            result.write(report)
        except OSError as e:
            _fail(e, common_ctx)
        typer.echo(f"Report written to '{report}'")
    if not result.passed:
        typer.secho(f"\n{len(result.failed)} of {len(result.checks)} checks failed.", fg=typer.colors.RED, err=True)
        raise typer.Exit(code=EXIT_NUMERICAL_FAILURE)
    typer.secho(f"\nAll {len(result.checks)} checks passed in {result.seconds:.1f}s.", fg=typer.colors.GREEN)


@app.command("sweep")
def sweep_command(
    ctx: typer.Context,
    delta: Annotated[Optional[List[float]], typer.Option("--delta", help="Shallowness values; repeatable.", show_default=False)] = None,
    weber: Annotated[Optional[List[float]], typer.Option("--weber", help="Weber numbers; repeatable.", show_default=False)] = None,
    z0: Annotated[Optional[List[float]], typer.Option("--z0", help="Initial heights; repeatable.", show_default=False)] = None,
    c0: Annotated[Optional[str], typer.Option("--c0", help=f"Current strength, or '{EQUAL_CURRENT}'.", show_default=False)] = None,
    method: Annotated[Optional[str], typer.Option("--method", help="exact or numeric.", show_default=False)] = None,
    t_end: Annotated[Optional[float], typer.Option("--t-end", help="End of the time window.", show_default=False)] = None,
    dt_out: Annotated[Optional[float], typer.Option("--dt-out", help="Spacing of output times.", show_default=False)] = None,
    fallback: Annotated[Optional[bool], typer.Option("--fallback/--no-fallback", help="Integrate numerically where no closed form applies.", show_default=False)] = None,
    workers: Annotated[Optional[int], typer.Option("--workers", help=f"Worker processes (default {DEFAULT_WORKERS}).", show_default=False)] = None,
    out: Annotated[Path, typer.Option("-o", "--out", help="JSON summary file.")] = Path("sweep.json"),
):
    """Run one trajectory per (delta, weber, z0) combination and summarise them."""
    common_ctx: GlobalContext = ctx.obj
    config = resolve_config(common_ctx)
    try:
        base = RunConfig.from_mapping(config).merged({
            "c0": _parse_c0(c0), "method": method, "t_end": t_end, "dt_out": dt_out, "fallback": fallback,
        })
        n_workers = workers if workers is not None else int(config.get("workers", DEFAULT_WORKERS))
        if n_workers < 1:
            raise ConfigurationError(f"--workers must be >= 1, got {n_workers}.")
        rows = run_sweep(base, delta or config.get("sweep_deltas", []), weber or config.get("sweep_webers", []),
                         z0 or config.get("sweep_z0s", []), n_workers, common_ctx.verbose)
        write_summary(rows, out)
    except (CapwaveError, OSError) as e:
        _fail(e, common_ctx)
    failed = [r for r in rows if r["status"] != "ok"]
    typer.echo(f"Summary of {len(rows)} runs written to '{out}'")
    if failed:
        typer.secho(f"{len(failed)} run(s) failed; see the summary for messages.", fg=typer.colors.YELLOW, err=True)
    else:
        typer.secho("Sweep successful.", fg=typer.colors.GREEN)


def main(): # Script entry point
    try:
        result = app(standalone_mode=False)
        sys.exit(result if isinstance(result, int) else 0)
    except typer.Exit as e:
        sys.exit(e.exit_code)
    except click.exceptions.Abort:
        typer.secho("Aborted.", fg=typer.colors.RED, err=True)
        sys.exit(EXIT_INVALID_INPUT)
    except click.exceptions.ClickException as e:
        # malformed flags are invalid input, not a regime problem
        e.show()
        sys.exit(EXIT_INVALID_INPUT)
    except SystemExit:
        raise
    except Exception as e:
        is_verbose_mode = "-v" in sys.argv or "--verbose" in sys.argv
        typer.secho(f"An unexpected critical error occurred in CLI: {e}", fg=typer.colors.RED, err=True)
        if is_verbose_mode:
            traceback.print_exc()
        sys.exit(exit_code_for(e))

if __name__ == "__main__":
    main()
