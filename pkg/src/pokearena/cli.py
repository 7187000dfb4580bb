"""Command-line entry point: benchmarks, hallucination test, replay, serving."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from pokearena.dex import DexError, load_bundled, load_pokedex, validate_chart
from pokearena.harness import halluc
from pokearena.harness.battlelog import LogError, ReplayMismatch
from pokearena.harness.battlelog import replay as replay_log
from pokearena.harness.report import (
    render_confusion_table,
    render_metrics_table,
    render_switch_table,
    write_confusion_report,
    write_metrics_report,
)
from pokearena.harness.runner import EndpointSpec, RunConfig, run_battles

AGENT_SPECS = "io | cot | sc:K | tot:K | random | maxpower | bot | oracle:<baseline>"


def _load_dex(data_dir):
    return load_pokedex(data_dir) if data_dir else load_bundled()


@click.group()
def main() -> None:
    """pokearena: deterministic battle benchmarks for LLM agents."""


@main.command()
@click.option("--agent", "agent_a", default="maxpower", show_default=True,
              help=f"side A agent: {AGENT_SPECS}")
@click.option("--opponent", "agent_b", default="bot", show_default=True,
              help=f"side B agent: {AGENT_SPECS}")
@click.option("--n", default=10, show_default=True, help="number of battles")
@click.option("--seed", default=1, show_default=True, help="master seed")
@click.option("--icrl", is_flag=True, help="enable feedback memory for side A")
@click.option("--kag", default="none", show_default=True,
              type=click.Choice(["none", "type", "effect", "both"]),
              help="knowledge annotations for side A")
@click.option("--endpoint-url", default="", help="LLM endpoint base URL")
@click.option("--model", default="", help="LLM model name")
@click.option("--temperature", default=None, type=float, help="sampling temperature")
@click.option("--turn-cap", default=200, show_default=True)
@click.option("--out", "out_dir", default=None,
              help="output directory (default runs/<matchup>_n<N>_seed<S>)")
@click.option("--workers", default=1, show_default=True, help="parallel battle workers")
@click.option("--draws-as-losses", is_flag=True, help="count draws in the win-rate denominator")
@click.option("--data-dir", default=None, help="dex data directory (default: bundled)")
@click.option("--json", "as_json", is_flag=True, help="print the report as JSON")
@click.option("--plots/--no-plots", default=True, show_default=True,
              help="render figures alongside the report files")
def battle(agent_a, agent_b, n, seed, icrl, kag, endpoint_url, model, temperature,
           turn_cap, out_dir, workers, draws_as_losses, data_dir, as_json, plots) -> None:
    """Run a batch of battles and write logs, report files, and figures."""
    endpoint = EndpointSpec(
        kind="http" if endpoint_url else "none",
        base_url=endpoint_url, model=model, temperature=temperature,
    )
    needs_endpoint = any(spec.split(":")[0] in ("io", "cot", "sc", "tot")
                         for spec in (agent_a, agent_b))
    if needs_endpoint and not endpoint_url:
        raise click.UsageError(
            "agent strategies io/cot/sc/tot require --endpoint-url and --model "
            "(or use oracle:<baseline> for offline runs)")
    if out_dir is None:
        safe = lambda s: s.replace(":", "")
        out_dir = f"runs/battle_{safe(agent_a)}_vs_{safe(agent_b)}_n{n}_seed{seed}"
    config = RunConfig(
        agent_a=agent_a, agent_b=agent_b, n=n, seed=seed, icrl=icrl, kag=kag,
        endpoint=endpoint, turn_cap=turn_cap, out_dir=out_dir, workers=workers,
        draws_as_losses=draws_as_losses, data_dir=data_dir,
    )
    report, outcomes = run_battles(config)
    write_metrics_report(Path(out_dir), report, outcomes, make_figures=plots)
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        click.echo(render_metrics_table(report))
        click.echo()
        click.echo(render_switch_table(report))
        click.echo(f"\nlogs and report written to {out_dir}/")


@main.command("halluc")
@click.option("--endpoint-url", default="", help="LLM endpoint base URL")
@click.option("--model", default="", help="LLM model name")
@click.option("--oracle", "use_oracle", is_flag=True,
              help="answer from the type chart (perfect reference)")
@click.option("--constant", default="", metavar="LETTER",
              help="constant-answer baseline, e.g. B")
@click.option("--out", "out_dir", default=None,
              help="output directory (default runs/halluc_<model>)")
@click.option("--data-dir", default=None)
@click.option("--json", "as_json", is_flag=True)
@click.option("--plots/--no-plots", default=True, show_default=True)
def halluc_cmd(endpoint_url, model, use_oracle, constant, out_dir, data_dir,
               as_json, plots) -> None:
    """Run the 324-pair type-advantage prediction test."""
    dex = _load_dex(data_dir)
    if use_oracle:
        endpoint = halluc.ChartOracleEndpoint(dex.chart)
        label = "oracle"
    elif constant:
        endpoint = halluc.ConstantAnswerEndpoint(constant.strip().upper())
        label = f"constant-{constant.strip().upper()}"
    elif endpoint_url and model:
        from pokearena.agent import HttpEndpoint
        endpoint = HttpEndpoint(endpoint_url, model)
        label = model
    else:
        raise click.UsageError("pick one of --oracle, --constant LETTER, "
                               "or --endpoint-url with --model")
    matrix = halluc.hallucination_test(endpoint, dex)
    if out_dir is None:
        out_dir = f"runs/halluc_{label}"
    write_confusion_report(Path(out_dir), matrix, label, make_figures=plots)
    if as_json:
        click.echo(json.dumps({"model": label, **matrix.to_dict()}, indent=2, sort_keys=True))
    else:
        click.echo(render_confusion_table(matrix, label))
        click.echo(f"\nreport written to {out_dir}/")


@main.command()
@click.argument("log_path", type=click.Path(exists=True))
@click.option("--verify", is_flag=True, help="exit nonzero if the replay mismatches")
@click.option("--data-dir", default=None)
def replay(log_path, verify, data_dir) -> None:
    """Replay a persisted battle log and report the reconstructed outcome."""
    dex = _load_dex(data_dir)
    try:
        state = replay_log(Path(log_path), dex, verify=True)
    except (LogError, ReplayMismatch) as exc:
        click.echo(f"replay failed: {exc}", err=True)
        sys.exit(1 if verify else 2)
    winner = "draw" if state.winner is None else f"side {state.winner}"
    click.echo(f"replayed {log_path}: winner {winner} ({state.finish_reason}) "
               f"after {state.field.turn_number - 1} turns")
    if verify:
        click.echo("verification OK: replay matches the recording")


@main.command("validate-data")
@click.argument("data_dir", type=click.Path(exists=True, file_okay=False))
def validate_data(data_dir) -> None:
    """Load and validate a dex directory; print the chart class counts."""
    try:
        dex = load_pokedex(data_dir)
    except DexError as exc:
        click.echo(f"invalid data: {exc}", err=True)
        sys.exit(1)
    counts = validate_chart(dex.chart)
    click.echo(f"type chart class counts (2x/1x/0.5x/0x): "
               f"{counts[0]}/{counts[1]}/{counts[2]}/{counts[3]}")
    click.echo(f"species: {len(dex.species)}, moves: {len(dex.moves)}, "
               f"abilities: {len(dex.abilities)}")


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--agent", default="maxpower", show_default=True,
              help=f"opponent agent: {AGENT_SPECS}")
@click.option("--seed", default=None, type=int, help="base seed for served battles")
@click.option("--data-dir", default=None)
@click.option("--endpoint-url", default="")
@click.option("--model", default="")
def serve(port, host, agent, seed, data_dir, endpoint_url, model) -> None:
    """Serve the human-vs-agent battle API for the web UI."""
    from pokearena.harness.server import serve as run_server

    endpoint = EndpointSpec(kind="http" if endpoint_url else "none",
                            base_url=endpoint_url, model=model)
    run_server(port=port, host=host, data_dir=data_dir, default_agent=agent,
               seed=seed, endpoint_spec=endpoint)


if __name__ == "__main__":
    main()
