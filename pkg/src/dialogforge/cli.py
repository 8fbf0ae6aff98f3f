"""Command line entry point: train models, evaluate them, chat in a
terminal REPL, or serve the HTTP gateway."""

from __future__ import annotations

import json
import os
import sys
import time
from pathlib import Path

import click

from .dialogue import handle_message
from .evalkit import evaluate_entities, evaluate_nlu, evaluate_policy
from .gateway import create_app, load_credentials
from .pipeline import (
    DEFAULT_SEED,
    build_engine,
    bundled_data_dir,
    load_bundle,
    load_models,
    save_models,
    train_pipeline,
)


@click.group()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Credentials file (verify_token=, page_access_token=).")
@click.option("--data-dir", type=click.Path(file_okay=False), default=None,
              help="Corpus bundle directory (defaults to the packaged corpus).")
@click.option("--model", "model_dir", type=click.Path(file_okay=False), default="models",
              show_default=True, help="Model directory to write or read.")
@click.option("--offline-fixtures/--live-clients", default=True, show_default=True,
              help="Use the bundled prayer/weather fixtures instead of live APIs.")
@click.pass_context
def main(ctx, config, data_dir, model_dir, offline_fixtures):
    """University-enquiry chatbot: train, evaluate, chat, serve."""
    ctx.obj = {
        "config": config,
        "data_dir": data_dir,
        "model_dir": model_dir,
        "offline_fixtures": offline_fixtures,
    }


def _engine_from(ctx_obj):
    model_dir = Path(ctx_obj["model_dir"])
    try:
        models = load_models(model_dir)
    except FileNotFoundError as exc:
        raise click.ClickException(f"{exc}; run 'dialogforge train' first")
    return build_engine(
        models,
        data_dir=ctx_obj["data_dir"],
        offline_fixtures=ctx_obj["offline_fixtures"],
    )


@main.command()
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.pass_obj
def train(obj, seed):
    """Train all models from the corpus bundle and save them."""
    started = time.perf_counter()
    models = train_pipeline(data_dir=obj["data_dir"], seed=seed)
    save_models(models, obj["model_dir"])
    elapsed = time.perf_counter() - started
    click.echo(f"trained intent ({len(models.intent_model.intents)} intents), "
               f"entities ({len(models.crf_model.tag_set.tags)} tags), "
               f"memoization ({len(models.memo.table)} windows), "
               f"recurrent policy ({len(models.rnn.actions)} actions) "
               f"in {elapsed:.1f}s -> {obj['model_dir']}")


def _echo_report(title, report):
    click.echo(title)
    click.echo(report.format_table())


@main.command("evaluate-nlu")
@click.option("--report", "report_path", type=click.Path(dir_okay=False),
              default="nlu_report.json", show_default=True)
@click.pass_obj
def evaluate_nlu_command(obj, report_path):
    """Self-evaluate the intent classifier and entity extractor."""
    models = load_models(obj["model_dir"])
    _, _, examples = load_bundle(obj["data_dir"] or bundled_data_dir())
    intent_report = evaluate_nlu(models.intent_model, examples)
    entity_report = evaluate_entities(models.crf_model, examples)
    _echo_report("intent classification:", intent_report)
    _echo_report("entity extraction:", entity_report)
    payload = {"intent": intent_report.to_dict(), "entities": entity_report.to_dict()}
    Path(report_path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    click.echo(f"report written to {report_path}")


@main.command("evaluate-core")
@click.option("--report", "report_path", type=click.Path(dir_okay=False),
              default="core_report.json", show_default=True)
@click.pass_obj
def evaluate_core_command(obj, report_path):
    """Replay the training stories against the policy ensemble."""
    engine = _engine_from(obj)
    _, stories, _ = load_bundle(obj["data_dir"] or bundled_data_dir())
    matrix = evaluate_policy(engine, stories)
    correct = sum(int(matrix.tp(label)) for label in matrix.labels)
    click.echo(f"{correct}/{matrix.total()} story decisions reproduced; "
               f"{'fully diagonal' if matrix.is_diagonal() else 'OFF-DIAGONAL CONFUSIONS PRESENT'}")
    for label in matrix.labels:
        support = int(matrix.support(label))
        if support:
            click.echo(f"  {label}: {int(matrix.tp(label))}/{support}")
    payload = {"labels": list(matrix.labels), "counts": matrix.counts.tolist()}
    Path(report_path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    click.echo(f"report written to {report_path}")


@main.command()
@click.option("--sender", default="shell", show_default=True)
@click.pass_obj
def shell(obj, sender):
    """Chat with the bot on stdin/stdout; Ctrl-D or /quit to leave."""
    engine = _engine_from(obj)
    click.echo("bot ready, type a message (/quit to leave)")
    while True:
        try:
            text = input("you> ")
        except (EOFError, KeyboardInterrupt):
            click.echo()
            break
        if text.strip() in ("/quit", "/q"):
            break
        if not text.strip():
            continue
        for reply in handle_message(engine, sender, text):
            click.echo(f"bot> {reply}")


@main.command()
@click.option("--port", type=int, default=None, help="Defaults to $PORT or 5005.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--frontend", "frontend_dir", type=click.Path(file_okay=False), default=None,
              help="Static web chat directory to serve at /.")
@click.pass_obj
def serve(obj, port, host, frontend_dir):
    """Run the webhook gateway."""
    import uvicorn

    engine = _engine_from(obj)
    credentials = load_credentials(obj["config"])
    app = create_app(engine, credentials, frontend_dir=frontend_dir)
    if port is None:
        port = int(os.environ.get("PORT", "5005"))
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main(prog_name="dialogforge")
