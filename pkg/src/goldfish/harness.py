"""End-to-end benchmark execution: synthesize each item's long video from
the episode manifest, ingest it through the engine, then retrieve, answer,
and judge every item.

Aggregated videos are segmented with the window set to the source-clip
duration whenever the episode's clips share one, so engine clip ordinals
line up 1:1 with source clips; otherwise engine hits are mapped back to
source clips by maximal time overlap before scoring retrieval accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .answering import (
    UNKNOWN_OPTION,
    McqQuestion,
    answer_mcq,
    answer_question,
    assemble_context,
)
from .benchmark import (
    AggregatedVideo,
    BenchmarkItem,
    EpisodeManifest,
    EvalReport,
    JudgeVerdict,
    compute_report,
    judge_open_ended,
)
from .engine import Engine
from .errors import (
    BackendError,
    MissingVideo,
    UnparseableChoice,
    UnparseableVerdict,
)
from .retrieval import FusionStrategy, RetrievalConfig, retrieve_top_k
from .subtitles import SubtitleCue, SubtitleTrack, serialize_track

DEFAULT_FPS = 30.0


@dataclass(frozen=True)
class SourceLayout:
    """Cumulative time offsets of the source clips inside one video."""

    clip_ids: tuple[str, ...]
    starts_ms: tuple[int, ...]
    ends_ms: tuple[int, ...]

    def ordinal_by_overlap(self, start_ms: int, end_ms: int) -> int:
        """1-based source clip with maximal overlap with [start, end)."""
        best, best_overlap = 1, -1
        for i, (s, e) in enumerate(zip(self.starts_ms, self.ends_ms)):
            overlap = min(e, end_ms) - max(s, start_ms)
            if overlap > best_overlap:
                best, best_overlap = i + 1, overlap
        return best


def video_manifest_for(
    video: AggregatedVideo, manifest: EpisodeManifest, fps: float = DEFAULT_FPS
) -> tuple[dict, str, int | None, SourceLayout]:
    """Build (engine manifest, SRT text, window override, layout) for one
    aggregated video.

    Raises:
        MissingVideo: the episode or a clip is absent from the manifest.
    """
    episode = manifest.episode(video.episode_id)
    if episode is None:
        raise MissingVideo(f"episode {video.episode_id!r} not in manifest")
    by_id = {c.clip_id: c for c in episode.clips}
    cues = []
    starts, ends = [], []
    offset = 0
    for clip_id in video.clip_ids:
        clip = by_id.get(clip_id)
        if clip is None:
            raise MissingVideo(f"clip {clip_id!r} not in episode {video.episode_id!r}")
        starts.append(offset)
        ends.append(offset + clip.duration_ms)
        if clip.subtitle_text:
            cues.append(
                SubtitleCue(
                    index=len(cues),
                    start_ms=offset,
                    end_ms=offset + clip.duration_ms,
                    text=clip.subtitle_text,
                )
            )
        offset += clip.duration_ms
    durations = {e - s for s, e in zip(starts, ends)}
    window = durations.pop() if len(durations) == 1 else None
    engine_manifest = {
        "video_id": video.video_id,
        "uri": f"bench://{video.video_id}",
        "fps": fps,
        "frame_count": round(offset * fps / 1000.0),
        "duration_ms": offset,
    }
    srt = serialize_track(SubtitleTrack(cues=tuple(cues)), "srt")
    return engine_manifest, srt, window, SourceLayout(
        clip_ids=video.clip_ids, starts_ms=tuple(starts), ends_ms=tuple(ends)
    )


def ensure_ingested(
    videos: dict[str, AggregatedVideo],
    manifest: EpisodeManifest,
    engine: Engine,
    *,
    force: bool = False,
) -> dict[str, SourceLayout]:
    """Ingest every distinct aggregated video that is not already ready."""
    layouts = {}
    for video_id, video in videos.items():
        engine_manifest, srt, window, layout = video_manifest_for(video, manifest)
        layouts[video_id] = layout
        if engine.index_path(video_id).exists() and not force:
            continue
        job = engine.ingest_video(
            engine_manifest, srt, "srt", force=force, clip_window_ms=window
        )
        if job.state != "ready":
            raise MissingVideo(f"ingest of {video_id!r} failed: {job.error}")
    return layouts


def _build_mcq(item: BenchmarkItem) -> McqQuestion:
    options = list(item.options or ())
    if len(options) == 5 and options[-1] == UNKNOWN_OPTION:
        return McqQuestion(stem=item.question, options=tuple(options))
    return McqQuestion.with_unknown_option(item.question, options)


def run_benchmark(
    items: Sequence[BenchmarkItem],
    manifest: EpisodeManifest,
    engine: Engine,
    *,
    k: int | None = None,
    fusion: FusionStrategy | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> EvalReport:
    """Execute the engine over every benchmark item and score the run.

    Backend failures on individual items are recorded (the item scores as
    incorrect) and surface in ``report.backends_unreachable`` instead of
    aborting the run.
    """
    if not items:
        raise ValueError("benchmark is empty")
    top_k = k or engine.config.k
    strategy = fusion or engine.config.fusion
    videos = {item.video_ref.video_id: item.video_ref for item in items}
    layouts = ensure_ingested(videos, manifest, engine)

    hits_per_item: list[list[int]] = []
    results: list[JudgeVerdict | int | None] = []
    answers: list[str] = []
    errors: list[str] = []
    unreachable = 0

    for i, item in enumerate(items):
        layout = layouts[item.video_ref.video_id]
        try:
            index = engine.get_index(item.video_ref.video_id)
            query = engine._embed_query(item.question, index)
            hits = retrieve_top_k(query, index, RetrievalConfig(k=top_k, strategy=strategy))
            records = index.records()
            source_hits = [
                layout.ordinal_by_overlap(records[h.clip_id].start_ms, records[h.clip_id].end_ms)
                for h in hits
            ]
            context = assemble_context(
                hits,
                records,
                engine.config.answer_strategy,
                item.question,
                descriptor_backend=engine.descriptor,
                clips=engine.get_clips(item.video_ref.video_id),
            )
            if item.is_mcq:
                try:
                    choice = answer_mcq(_build_mcq(item), context, engine.answerer)
                    results.append(choice)
                    answers.append(f"option {choice}")
                except UnparseableChoice:
                    results.append(None)
                    answers.append("")
            else:
                answer = answer_question(item.question, context, engine.answerer)
                answers.append(answer.text)
                try:
                    results.append(
                        judge_open_ended(
                            item.question, str(item.gt_answer), answer.text, engine.judge
                        )
                    )
                except UnparseableVerdict:
                    results.append(None)
            hits_per_item.append(source_hits)
            errors.append("")
        except BackendError as exc:
            unreachable += 1
            hits_per_item.append([])
            results.append(None)
            answers.append("")
            errors.append(f"{type(exc).__name__}: {exc}")
        if progress:
            progress(i + 1, len(items))

    report = compute_report(
        items, hits_per_item, results, top_k, answers=answers, errors=errors
    )
    report.backends_unreachable = unreachable
    return report
