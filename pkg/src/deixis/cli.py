"""Command-line interface: replay, evaluate, generate, serve."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__
from .config import load_config
from .harness import (
    evaluate,
    load_episode,
    load_episode_dir,
    make_clutter_episode,
    save_episode,
)
from .harness.replay import replay as run_replay


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="YAML config merged over the packaged defaults.")
@click.version_option(__version__)
@click.pass_context
def main(ctx, config_path):
    """Voice + pointing fusion pipeline: replay episodes, score them, serve live sessions."""
    ctx.obj = load_config(config_path)


@main.command("replay")
@click.argument("episode", type=click.Path(exists=True))
@click.option("--trajectory", type=click.Path(), default=None,
              help="Write the trajectory log (JSON lines) here.")
@click.pass_obj
def replay_cmd(config, episode, trajectory):
    """Replay one episode; exit nonzero iff a hard verdict occurred."""
    result = run_replay(load_episode(episode), config)
    for verdict in result.verdicts:
        if verdict.get("ok"):
            click.echo(f"[ok] {verdict['stage']}: {verdict.get('intention', '')}")
        else:
            click.echo(
                f"[FAIL] {verdict['stage']}: {verdict['error']}: {verdict['message']}"
            )
    for intent in result.intentions:
        click.echo(f"intention: {intent.as_dict()}")
    if result.workcell is not None:
        click.echo(f"final robot: {result.workcell.robot.as_dict()}")
        if trajectory:
            Path(trajectory).write_text(result.workcell.export_log() + "\n")
            click.echo(f"trajectory written to {trajectory}")
    if result.intent_match is not None:
        click.echo(f"intent match: {result.intent_match}")
    if result.final_match is not None:
        click.echo(f"final-state match: {result.final_match}")
    sys.exit(1 if result.hard_errors else 0)


@main.command("evaluate")
@click.argument("episode_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Write the JSON report here.")
@click.pass_obj
def evaluate_cmd(config, episode_dir, report_path):
    """Replay every episode in a directory and print the metrics report."""
    episodes = load_episode_dir(episode_dir)
    report, _ = evaluate(episodes, config)
    click.echo(report.text_table())
    if report_path:
        Path(report_path).write_text(report.to_json() + "\n")
        click.echo(f"report written to {report_path}")


@main.command("generate")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--n", "count", type=int, default=20, show_default=True,
              help="Episodes per noise level.")
@click.option("--noise-deg", "noise", type=str, default="2.0", show_default=True,
              help="Comma-separated ray-noise sigmas in degrees.")
@click.option("--seed", type=int, default=20240601, show_default=True)
@click.pass_obj
def generate_cmd(config, out_dir, count, noise, seed):
    """Generate synthetic cluttered-scene episodes with noisy pointing."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sigmas = [float(s) for s in noise.split(",") if s.strip()]
    written = 0
    for sigma in sigmas:
        for i in range(count):
            episode = make_clutter_episode(config, seed, sigma, i)
            save_episode(episode, out / f"{episode.name}.jsonl")
            written += 1
    click.echo(f"wrote {written} episodes to {out}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8787, show_default=True)
@click.pass_obj
def serve_cmd(config, host, port):
    """Start the live session gateway (websocket at /session)."""
    import uvicorn

    from .gateway import create_app

    uvicorn.run(create_app(config), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
