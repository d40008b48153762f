"""Pipeline orchestration: ingest (segment, describe, embed, persist) and
query (retrieve, assemble, answer) against the persisted per-video index.

Ingest is tracked through an IngestJob whose state moves monotonically
queued -> describing -> embedding -> ready | failed. Clip metadata
(frame indices and spans) is persisted beside the index so answer
strategies B/C can rebuild descriptor requests after a restart.
"""
from __future__ import annotations

import json
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .answering import (
    AnswerStrategy,
    answer_question,
    assemble_context,
)
from .backends import (
    make_answer_backend,
    make_descriptor_backend,
    make_embedding_backend,
    make_judge_backend,
)
from .config import EngineConfig
from .descriptor import build_interleaved_prompt, describe_clip
from .embedding import embed_text, embed_texts
from .errors import (
    DuplicateVideoId,
    EncoderMismatch,
    GoldfishError,
    InvalidManifest,
    VideoNotReady,
)
from .index import INDEX_SUFFIX, ClipRecord, VideoIndex
from .retrieval import (
    FusionStrategy,
    RetrievalConfig,
    RetrievalQuery,
    retrieve_top_k,
    score_keys,
)
from .segmentation import Clip, VideoSource, align_subtitles, segment_video
from .subtitles import SubtitleTrack, parse_subtitles

CLIPS_SUFFIX = ".clips.json"

JOB_QUEUED = "queued"
JOB_DESCRIBING = "describing"
JOB_EMBEDDING = "embedding"
JOB_READY = "ready"
JOB_FAILED = "failed"


@dataclass
class IngestJob:
    job_id: str
    video_id: str
    state: str = JOB_QUEUED
    clips_done: int = 0
    clips_total: int = 0
    error: str | None = None

    def as_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "video_id": self.video_id,
            "state": self.state,
            "progress": {"done": self.clips_done, "total": self.clips_total},
            "error": self.error,
        }


@dataclass
class HitDetail:
    clip_id: int
    score: float
    matched_kind: str
    start_ms: int
    end_ms: int
    summary_text: str

    def as_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class AskResponse:
    answer: str
    hits: list[HitDetail]
    strategy: str
    timings_ms: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "answer": self.answer,
            "hits": [h.as_dict() for h in self.hits],
            "strategy": self.strategy,
            "timings_ms": self.timings_ms,
        }


def parse_manifest(manifest: dict) -> VideoSource:
    """Validate a video manifest and build the source reference.

    Raises:
        InvalidManifest: missing or malformed required fields.
    """
    try:
        video_id = str(manifest["video_id"])
        uri = str(manifest.get("uri", video_id))
        fps = float(manifest["fps"])
        frame_count = int(manifest["frame_count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidManifest(f"manifest missing or malformed field: {exc}") from exc
    if not video_id:
        raise InvalidManifest("video_id must be non-empty")
    try:
        return VideoSource(
            id=video_id,
            uri=uri,
            fps=fps,
            frame_count=frame_count,
            width=int(manifest.get("width", 0)),
            height=int(manifest.get("height", 0)),
            duration_ms=int(manifest.get("duration_ms", 0)),
        )
    except ValueError as exc:
        raise InvalidManifest(str(exc)) from exc


class Engine:
    """Owns the backends, the index store, and the ingest/ask workflows."""

    def __init__(
        self,
        config: EngineConfig | None = None,
        *,
        descriptor_backend=None,
        embedding_backend=None,
        answer_backend=None,
        judge_backend=None,
    ):
        self.config = config or EngineConfig()
        self.descriptor = descriptor_backend or make_descriptor_backend(
            self.config.descriptor_endpoint,
            self.config.descriptor_api_key,
        )
        self.encoder = embedding_backend or make_embedding_backend(
            self.config.embedding_endpoint,
            self.config.embedding_api_key,
            model=self.config.embedding_model,
        )
        self.answerer = answer_backend or make_answer_backend(
            self.config.answer_endpoint,
            self.config.answer_api_key,
            model=self.config.answer_model,
            temperature=self.config.answer_temperature,
        )
        self.judge = judge_backend or make_judge_backend(
            self.config.judge_endpoint,
            self.config.judge_api_key,
            model=self.config.judge_model,
        )
        self.index_dir = Path(self.config.index_dir)
        self.jobs: dict[str, IngestJob] = {}
        # insertion-ordered, bounded: everything is on disk, so eviction
        # only costs a reload
        self._index_cache: dict[str, VideoIndex] = {}
        self._clips_cache: dict[str, dict[int, Clip]] = {}

    def _cache_put(self, cache: dict, key: str, value) -> None:
        cache.pop(key, None)
        cache[key] = value
        while len(cache) > max(1, self.config.index_cache_size):
            cache.pop(next(iter(cache)))

    # --- paths ---

    def index_path(self, video_id: str) -> Path:
        return self.index_dir / f"{video_id}{INDEX_SUFFIX}"

    def clips_path(self, video_id: str) -> Path:
        return self.index_dir / f"{video_id}{CLIPS_SUFFIX}"

    # --- ingest ---

    def create_job(self, video_id: str) -> IngestJob:
        job = IngestJob(job_id=uuid.uuid4().hex[:12], video_id=video_id)
        self.jobs[job.job_id] = job
        return job

    def ingest_video(
        self,
        manifest: dict,
        subtitles: str | None = None,
        subtitle_format: str = "srt",
        *,
        force: bool = False,
        job: IngestJob | None = None,
        clip_window_ms: int | None = None,
    ) -> IngestJob:
        """Run the full ingest pipeline for one video, synchronously.

        Raises:
            InvalidManifest, DuplicateVideoId: before any work starts.
        Backend failures during the pipeline mark the job failed instead
        of raising.
        """
        source = parse_manifest(manifest)
        if self.index_path(source.id).exists() and not force:
            raise DuplicateVideoId(f"video {source.id!r} already ingested; use force")
        job = job or self.create_job(source.id)
        track = (
            parse_subtitles(subtitles, subtitle_format)
            if subtitles
            else SubtitleTrack()
        )
        try:
            self._run_pipeline(source, track, job, clip_window_ms)
        except GoldfishError as exc:
            job.state = JOB_FAILED
            job.error = f"{type(exc).__name__}: {exc}"
        return job

    def _run_pipeline(
        self,
        source: VideoSource,
        track: SubtitleTrack,
        job: IngestJob,
        clip_window_ms: int | None,
    ) -> None:
        clips = segment_video(
            source,
            clip_window_ms=clip_window_ms or self.config.clip_window_ms,
            max_frames=self.config.max_frames,
        )
        clips = align_subtitles(track, clips)
        job.clips_total = len(clips)

        job.state = JOB_DESCRIBING
        summaries = {}

        describe_track = track if self.config.describe_with_subtitles else SubtitleTrack()

        def describe(clip: Clip) -> tuple[int, str]:
            if clip.frame_indices:
                request = build_interleaved_prompt(
                    clip, describe_track, fps=source.fps, uri=source.uri
                )
                description = describe_clip(
                    request,
                    self.descriptor,
                    retries=self.config.retries,
                    backoff_s=self.config.backoff_s,
                )
                return clip.clip_id, description.summary_text
            return clip.clip_id, ""

        if self.config.parallelism > 1:
            with ThreadPoolExecutor(max_workers=self.config.parallelism) as pool:
                for clip_id, text in pool.map(describe, clips):
                    summaries[clip_id] = text
                    job.clips_done += 1
        else:
            for clip in clips:
                clip_id, text = describe(clip)
                summaries[clip_id] = text
                job.clips_done += 1

        job.state = JOB_EMBEDDING
        summary_vecs = embed_texts([summaries[c.clip_id] for c in clips], self.encoder)
        subtitle_vecs = embed_texts([c.subtitle_text for c in clips], self.encoder)
        index = VideoIndex(video_id=source.id)
        for clip, summary_vec, subtitle_vec in zip(clips, summary_vecs, subtitle_vecs):
            index.upsert_clip(
                ClipRecord(
                    clip_id=clip.clip_id,
                    summary_text=summaries[clip.clip_id],
                    subtitle_text=clip.subtitle_text,
                    start_ms=clip.start_ms,
                    end_ms=clip.end_ms,
                ),
                summary_vec=summary_vec,
                subtitle_vec=subtitle_vec,
            )

        self.index_dir.mkdir(parents=True, exist_ok=True)
        index.save(self.index_path(source.id))
        self.clips_path(source.id).write_text(
            json.dumps(
                {
                    "video_id": source.id,
                    "uri": source.uri,
                    "fps": source.fps,
                    "clips": [
                        {
                            "clip_id": c.clip_id,
                            "start_ms": c.start_ms,
                            "end_ms": c.end_ms,
                            "frame_indices": list(c.frame_indices),
                            "subtitle_text": c.subtitle_text,
                        }
                        for c in clips
                    ],
                }
            ),
            encoding="utf-8",
        )
        self._cache_put(self._index_cache, source.id, index)
        self._cache_put(self._clips_cache, source.id, {c.clip_id: c for c in clips})
        job.state = JOB_READY

    # --- lookup ---

    def get_index(self, video_id: str) -> VideoIndex:
        index = self._index_cache.get(video_id)
        if index is None:
            path = self.index_path(video_id)
            if not path.exists():
                raise VideoNotReady(f"no ready index for video {video_id!r}")
            index = VideoIndex.load(path)
            self._cache_put(self._index_cache, video_id, index)
        return index

    def get_clips(self, video_id: str) -> dict[int, Clip]:
        clips = self._clips_cache.get(video_id)
        if clips is None:
            path = self.clips_path(video_id)
            if not path.exists():
                return {}
            payload = json.loads(path.read_text(encoding="utf-8"))
            clips = {
                c["clip_id"]: Clip(
                    clip_id=c["clip_id"],
                    start_ms=c["start_ms"],
                    end_ms=c["end_ms"],
                    frame_indices=tuple(c["frame_indices"]),
                    subtitle_text=c["subtitle_text"],
                )
                for c in payload["clips"]
            }
            self._cache_put(self._clips_cache, video_id, clips)
        return clips

    def list_videos(self) -> list[str]:
        if not self.index_dir.exists():
            return []
        return sorted(p.name[: -len(INDEX_SUFFIX)] for p in self.index_dir.glob(f"*{INDEX_SUFFIX}"))

    # --- query ---

    def _embed_query(self, question: str, index: VideoIndex) -> RetrievalQuery:
        embedding = embed_text(question, self.encoder)
        if index.manifest.encoder_id and embedding.encoder_id != index.manifest.encoder_id:
            raise EncoderMismatch(
                f"query encoder {embedding.encoder_id!r} does not match index "
                f"encoder {index.manifest.encoder_id!r}"
            )
        return RetrievalQuery(question=question, embedding=embedding)

    def ask(
        self,
        video_id: str,
        question: str,
        *,
        k: int | None = None,
        strategy: FusionStrategy | str | None = None,
        answer_strategy: AnswerStrategy | str | None = None,
    ) -> AskResponse:
        """Retrieve the top-k clips for the question and answer from them."""
        index = self.get_index(video_id)
        fusion = FusionStrategy(strategy) if strategy else self.config.fusion
        ans_strategy = (
            AnswerStrategy(answer_strategy) if answer_strategy else self.config.answer_strategy
        )
        retrieval = RetrievalConfig(k=k or self.config.k, strategy=fusion)

        t0 = time.perf_counter()
        query = self._embed_query(question, index)
        t1 = time.perf_counter()
        hits = retrieve_top_k(query, index, retrieval)
        t2 = time.perf_counter()
        records = index.records()
        context = assemble_context(
            hits,
            records,
            ans_strategy,
            question,
            descriptor_backend=self.descriptor,
            clips=self.get_clips(video_id),
        )
        answer = answer_question(question, context, self.answerer, ans_strategy)
        t3 = time.perf_counter()

        details = [
            HitDetail(
                clip_id=h.clip_id,
                score=h.score,
                matched_kind=h.matched_kind,
                start_ms=records[h.clip_id].start_ms,
                end_ms=records[h.clip_id].end_ms,
                summary_text=records[h.clip_id].summary_text,
            )
            for h in hits
        ]
        return AskResponse(
            answer=answer.text,
            hits=details,
            strategy=ans_strategy.value,
            timings_ms={
                "embed_query": (t1 - t0) * 1000.0,
                "retrieve": (t2 - t1) * 1000.0,
                "answer": (t3 - t2) * 1000.0,
            },
        )

    def retrieve_debug(
        self,
        video_id: str,
        question: str,
        *,
        strategy: FusionStrategy | str | None = None,
        k: int | None = None,
    ) -> list[dict]:
        """All key scores for a question, sorted; for ablation inspection."""
        index = self.get_index(video_id)
        fusion = FusionStrategy(strategy) if strategy else self.config.fusion
        query = self._embed_query(question, index)
        scored = score_keys(query, index, fusion)
        if k is not None:
            scored = scored[:k]
        return [
            {"clip_id": s.clip_id, "kind": s.kind, "score": s.score} for s in scored
        ]
