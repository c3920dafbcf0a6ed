"""Command-line interface.

Subcommands mirror the run functions: scan, convergence, fidelity,
scaling, cc-only.  Every run takes a YAML config (all keys optional),
writes CSV + JSON + PNG files into --out, and exits 0 on success, 2 if
some energy points failed, 1 on configuration errors.
"""

import sys

import click

from . import runs
from .config import ConfigError, load_config

_RUNNERS = {
    "scan": runs.run_scan,
    "convergence": runs.run_convergence,
    "fidelity": runs.run_fidelity_table,
    "scaling": runs.run_scaling,
    "cc-only": runs.run_cc_only,
}


def _common_options(fn):
    fn = click.option(
        "--config", "config_path", type=click.Path(exists=True, dir_okay=False),
        default=None, help="YAML run configuration.",
    )(fn)
    fn = click.option("--out", "out_dir", type=click.Path(file_okay=False),
                      default="results", show_default=True)(fn)
    fn = click.option("--seed", type=int, default=None,
                      help="Override the RNG seed.")(fn)
    fn = click.option("--inverter", type=click.Choice(["classical", "vqls"]),
                      default=None, help="Matrix inversion backend.")(fn)
    fn = click.option("--depth", type=int, default=None,
                      help="Ansatz depth for the vqls inverter.")(fn)
    fn = click.option("--jobs", type=int, default=None,
                      help="Worker processes for energy grids.")(fn)
    fn = click.option("--no-plots", is_flag=True, default=False,
                      help="Skip figure rendering.")(fn)
    return fn


def _overrides(seed, inverter, depth, jobs, no_plots) -> dict:
    out: dict = {}
    if seed is not None:
        out["seed"] = seed
    if inverter is not None:
        out["inverter"] = inverter
    if depth is not None:
        out["vqls"] = {"depth": depth}
    if jobs is not None:
        out["jobs"] = jobs
    if no_plots:
        out["plots"] = False
    return out


def _run(name, config_path, out_dir, **kw):
    try:
        cfg = load_config(config_path, _overrides(**kw))
    except (ConfigError, OSError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    code, summary = _RUNNERS[name](cfg, out_dir)
    for err in summary.get("errors", []):
        click.echo(f"point failed: {err}", err=True)
    click.echo(f"{name}: wrote {out_dir} (config {summary['config_hash']})")
    sys.exit(code)


@click.group()
def main():
    """Multichannel scattering S-matrices via the Kohn variational
    principle, with a classical or variational-quantum matrix inverter."""


def _register(name: str, help_text: str):
    @main.command(name=name, help=help_text)
    @_common_options
    def _cmd(config_path, out_dir, seed, inverter, depth, jobs, no_plots):
        _run(
            name,
            config_path,
            out_dir,
            seed=seed,
            inverter=inverter,
            depth=depth,
            jobs=jobs,
            no_plots=no_plots,
        )


_register("scan", "Energy scan: solver vs coupled-channel S-matrices.")
_register("convergence", "Basis-set convergence study (1-d problem).")
_register("fidelity", "Per-column VQLS inversion fidelity table.")
_register("scaling", "Qubit / Pauli-term resource estimates.")
_register("cc-only", "Coupled-channel reference scan only.")


if __name__ == "__main__":
    main()
