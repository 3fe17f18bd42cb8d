"""Command line entry point: ``wavemult <experiment> [flags]``.

Exit status is 0 iff every gating check passes, 1 when a check fails and 2
for invalid input.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .experiments import EXPERIMENTS, ExperimentConfig, load_configs, parse_p, run_all, run_experiment

SUBCOMMANDS = [name for name in EXPERIMENTS if name != "transform-check"]


def _p_type(value):
    if value is None:
        return None
    try:
        return parse_p(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(f"cannot parse p = {value!r}: {exc}") from exc


def _shared(fn):
    opts = [
        click.option("--n", "n", type=int, default=None, help="Dimension."),
        click.option("--N", "N", type=int, default=None, help="Grid points per axis."),
        click.option("--L", "L", type=float, default=None, help="Box side length."),
        click.option("--p", "p", default=None, callback=lambda c, prm, v: _p_type(v),
                     help="Exponent, e.g. 1, 3/2, inf."),
        click.option("--beta", type=float, default=None, help="Atom order."),
        click.option("--b", "b", type=float, default=None, help="Multiplier order (defaults to b_p)."),
        click.option("--ells", default=None, help="Comma separated cube sides."),
        click.option("--ts", default=None, help="Comma separated times."),
        click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None,
                     help="Directory for the CSV and JSON outputs."),
        click.option("--config", "config", type=click.Path(exists=True, dir_okay=False, path_type=Path),
                     default=None, help="INI file; flags override its values."),
        click.option("--seed", type=int, default=None, help="RNG seed."),
        click.option("--json", "as_json", is_flag=True, help="Print the JSON summary instead of text."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _emit(rep, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(rep.summary(), indent=2, sort_keys=True))
    else:
        click.echo("\n".join(rep.lines()))


def _build(name, config, **flags) -> ExperimentConfig:
    base = ExperimentConfig(name)
    if config is not None:
        matches = [c for c in load_configs(config) if c.experiment == name]
        if matches:
            base = matches[0]
    return base.with_overrides(**flags)


def _make_command(name: str):
    @click.command(name=name, help=f"Run the {name} experiment.")
    @_shared
    def cmd(config, as_json, **flags):
        try:
            cfg = _build(name, config, **flags)
            rep = run_experiment(cfg)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
        _emit(rep, as_json)
        sys.exit(0 if rep.passed else 1)

    return cmd


@click.group()
@click.version_option(package_name="wavemult")
def main():
    """Numerical experiments for oscillatory wave multipliers on atoms."""


for _name in SUBCOMMANDS:
    main.add_command(_make_command(_name))


@main.command("run-all", help="Run every experiment (or every section of --config).")
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--seed", type=int, default=None)
def run_all_cmd(config, out, seed):
    try:
        configs = load_configs(config) if config is not None else None
        if seed is not None:
            configs = [c.with_overrides(seed=seed) for c in
                       (configs or [ExperimentConfig(n) for n in EXPERIMENTS])]
        ok, reports = run_all(configs, out=out, progress=lambda r: click.echo("\n".join(r.lines())))
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    failed = [r.experiment for r in reports if not r.passed]
    click.echo(f"run-all: {len(reports) - len(failed)}/{len(reports)} experiments pass"
               + (f"; failing: {', '.join(failed)}" if failed else ""))
    sys.exit(0 if ok else 1)


if __name__ == "__main__":  # pragma: no cover
    main()
