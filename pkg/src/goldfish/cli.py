"""Command-line interface.

Verbs: ingest, ask, retrieve, bench build / bench run / bench convert-tvqa,
serve. Configuration precedence is flags > environment > config file >
defaults; see config.py for the variable names.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .benchmark import (
    EpisodeManifest,
    build_episode_benchmark,
    build_window_variant,
    load_clip_level_items,
)
from .config import load_config
from .engine import Engine
from .errors import GoldfishError
from .harness import run_benchmark
from .report import summary_lines, write_report
from .retrieval import FusionStrategy

_STRATEGY_CHOICES = [s.value for s in FusionStrategy]


def _engine(ctx: click.Context, **overrides) -> Engine:
    config_path = ctx.obj.get("config_path")
    merged = dict(ctx.obj.get("overrides", {}))
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return Engine(load_config(config_path, overrides=merged))


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Config file (YAML/JSON); defaults to $GOLDFISH_CONFIG.")
@click.option("--index-dir", default=None, help="Index directory override.")
@click.pass_context
def main(ctx, config_path, index_dir):
    """Retrieval-augmented question answering over long videos."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["overrides"] = {"index_dir": index_dir} if index_dir else {}


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True),
              help="Video manifest JSON (video_id, uri, fps, frame_count).")
@click.option("--subtitles", "subtitles_path", type=click.Path(exists=True), default=None)
@click.option("--format", "subtitle_format", type=click.Choice(["srt", "vtt"]), default=None,
              help="Subtitle format; inferred from the file suffix when omitted.")
@click.option("--force", is_flag=True, help="Replace an existing index for this video id.")
@click.pass_context
def ingest(ctx, manifest_path, subtitles_path, subtitle_format, force):
    """Segment, describe, embed, and persist one video."""
    engine = _engine(ctx)
    manifest = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    subtitles = None
    if subtitles_path:
        subtitles = Path(subtitles_path).read_text(encoding="utf-8")
        if subtitle_format is None:
            subtitle_format = "vtt" if subtitles_path.endswith(".vtt") else "srt"
    try:
        job = engine.ingest_video(
            manifest, subtitles, subtitle_format or "srt", force=force
        )
    except GoldfishError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    click.echo(json.dumps(job.as_dict(), indent=2))
    if job.state != "ready":
        sys.exit(1)


@main.command()
@click.argument("video_id")
@click.argument("question")
@click.option("--k", type=int, default=None)
@click.option("--strategy", type=click.Choice(_STRATEGY_CHOICES), default=None)
@click.option("--answer-strategy", type=click.Choice(["A", "B", "C"]), default=None)
@click.pass_context
def ask(ctx, video_id, question, k, strategy, answer_strategy):
    """Answer a question about an ingested video."""
    engine = _engine(ctx)
    try:
        response = engine.ask(
            video_id, question, k=k, strategy=strategy, answer_strategy=answer_strategy
        )
    except GoldfishError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    click.echo(json.dumps(response.as_dict(), indent=2))


@main.command()
@click.argument("video_id")
@click.argument("question")
@click.option("--k", type=int, default=None, help="Truncate the dump to the top k keys.")
@click.option("--strategy", type=click.Choice(_STRATEGY_CHOICES), default=None)
@click.pass_context
def retrieve(ctx, video_id, question, k, strategy):
    """Dump scored retrieval keys for a question (debug/ablation)."""
    engine = _engine(ctx)
    try:
        scored = engine.retrieve_debug(video_id, question, strategy=strategy, k=k)
    except GoldfishError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    click.echo(json.dumps(scored, indent=2))


@main.group()
def bench():
    """Benchmark building and execution."""


def _load_bench_inputs(items_path, manifest_path, window):
    items = load_clip_level_items(items_path)
    if not items:
        raise click.ClickException(f"benchmark items file {items_path} is empty")
    manifest = EpisodeManifest.from_file(manifest_path)
    try:
        if window:
            return build_window_variant(items, manifest, window), manifest
        return build_episode_benchmark(items, manifest), manifest
    except GoldfishError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")


@bench.command("build")
@click.option("--items", "items_path", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--window", type=click.Choice(["5", "10", "20"]), default=None,
              help="Build the n-clip aggregation-window variant instead of full episodes.")
@click.option("--out", "out_path", required=True, type=click.Path())
def bench_build(items_path, manifest_path, window, out_path):
    """Materialize an episode-level (or window-variant) benchmark file."""
    bench_items, _ = _load_bench_inputs(items_path, manifest_path, int(window) if window else None)
    payload = [
        {
            "item_id": b.item_id,
            "episode_id": b.episode_id,
            "question": b.question,
            "gt_answer": b.gt_answer,
            "gt_clip_id": b.gt_clip_id,
            "options": list(b.options) if b.options else None,
            "video_ref": {
                "video_id": b.video_ref.video_id,
                "episode_id": b.video_ref.episode_id,
                "clip_ids": list(b.video_ref.clip_ids),
            },
        }
        for b in bench_items
    ]
    Path(out_path).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    click.echo(f"wrote {len(payload)} items to {out_path}")


@bench.command("run")
@click.option("--items", "items_path", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--window", type=click.Choice(["5", "10", "20"]), default=None)
@click.option("--k", type=int, default=None)
@click.option("--out-dir", default="bench_report", type=click.Path())
@click.pass_context
def bench_run(ctx, items_path, manifest_path, window, k, out_dir):
    """Run the engine over a benchmark and write the report bundle."""
    engine = _engine(ctx)
    bench_items, manifest = _load_bench_inputs(
        items_path, manifest_path, int(window) if window else None
    )
    try:
        report = run_benchmark(bench_items, manifest, engine, k=k)
    except GoldfishError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    paths = write_report(report, out_dir)
    for line in summary_lines(report):
        click.echo(line)
    click.echo(f"report written to {paths['report']}")
    if report.backends_unreachable:
        sys.exit(2)


@bench.command("convert-tvqa")
@click.option("--qa", "qa_path", required=True, type=click.Path(exists=True),
              help="TVQA-format jsonl (q, a0..a4, answer_idx, vid_name, qid).")
@click.option("--subtitles", "subtitles_path", type=click.Path(exists=True), default=None,
              help="Optional JSON mapping clip name -> subtitle text.")
@click.option("--items-out", required=True, type=click.Path())
@click.option("--manifest-out", required=True, type=click.Path())
def bench_convert_tvqa(qa_path, subtitles_path, items_out, manifest_out):
    """Convert TVQA-layout QA data to the generic benchmark format."""
    from .tvqa import convert_tvqa_file

    n_items, n_episodes = convert_tvqa_file(qa_path, items_out, manifest_out, subtitles_path)
    click.echo(f"converted {n_items} items across {n_episodes} episodes")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8765)
@click.pass_context
def serve(ctx, host, port):
    """Start the HTTP service."""
    from .service import serve as run_service

    config = load_config(ctx.obj.get("config_path"), overrides=ctx.obj.get("overrides", {}))
    run_service(host=host, port=port, config=config)


if __name__ == "__main__":
    main()
