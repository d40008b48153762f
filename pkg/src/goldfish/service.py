"""HTTP service over the engine.

Endpoints (JSON bodies):

* POST /videos                  ingest a video (manifest + subtitles); async
* GET  /jobs/{job_id}           poll an ingest job
* GET  /videos/{id}/clips       clip spans, summaries, subtitles
* POST /videos/{id}/ask         question -> answer + provenance hits
* GET  /videos/{id}/retrieve    scored-key dump (ablation/debug)
* POST /benchmarks/run          run a benchmark file, write the report
"""
from __future__ import annotations

from fastapi import BackgroundTasks, FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import __version__
from .benchmark import (
    EpisodeManifest,
    build_episode_benchmark,
    build_window_variant,
    load_clip_level_items,
)
from .config import EngineConfig
from .engine import Engine, parse_manifest
from .errors import (
    BackendError,
    DuplicateVideoId,
    EmptyIndex,
    GoldfishError,
    InvalidManifest,
    MissingVideo,
    VideoNotReady,
)
from .harness import run_benchmark
from .report import summary_lines, write_report

_STATUS = {
    InvalidManifest: 422,
    DuplicateVideoId: 409,
    VideoNotReady: 409,
    MissingVideo: 404,
    EmptyIndex: 409,
    BackendError: 502,
}


def _http_error(exc: GoldfishError) -> HTTPException:
    for etype, code in _STATUS.items():
        if isinstance(exc, etype):
            return HTTPException(status_code=code, detail=f"{type(exc).__name__}: {exc}")
    return HTTPException(status_code=500, detail=f"{type(exc).__name__}: {exc}")


class IngestRequest(BaseModel):
    manifest: dict
    subtitles: str | None = None
    subtitle_format: str = "srt"
    force: bool = False


class AskRequest(BaseModel):
    question: str = Field(min_length=1)
    k: int | None = None
    strategy: str | None = None
    answer_strategy: str | None = None


class BenchmarkRunRequest(BaseModel):
    items_path: str
    manifest_path: str
    out_dir: str = "bench_report"
    window: int | None = None
    k: int | None = None


def create_app(engine: Engine | None = None, config: EngineConfig | None = None) -> FastAPI:
    engine = engine or Engine(config)
    app = FastAPI(title="goldfish", version=__version__)
    app.state.engine = engine
    # the chat UI is served from its own origin; auth is out of scope
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/videos")
    def ingest(req: IngestRequest, background: BackgroundTasks):
        try:
            source = parse_manifest(req.manifest)
            if engine.index_path(source.id).exists() and not req.force:
                raise DuplicateVideoId(f"video {source.id!r} already ingested; use force")
        except GoldfishError as exc:
            raise _http_error(exc)
        job = engine.create_job(source.id)
        background.add_task(
            engine.ingest_video,
            req.manifest,
            req.subtitles,
            req.subtitle_format,
            force=req.force,
            job=job,
        )
        return job.as_dict()

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        job = engine.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"no job {job_id!r}")
        return job.as_dict()

    @app.get("/videos")
    def list_videos():
        return {"videos": engine.list_videos()}

    @app.get("/videos/{video_id}/clips")
    def clips(video_id: str):
        try:
            index = engine.get_index(video_id)
        except GoldfishError as exc:
            raise _http_error(exc)
        return {
            "video_id": video_id,
            "clips": [
                {
                    "clip_id": r.clip_id,
                    "start_ms": r.start_ms,
                    "end_ms": r.end_ms,
                    "summary_text": r.summary_text,
                    "subtitle_text": r.subtitle_text,
                }
                for r in (index.record(cid) for cid in index.clip_ids())
            ],
        }

    @app.post("/videos/{video_id}/ask")
    def ask(video_id: str, req: AskRequest):
        try:
            response = engine.ask(
                video_id,
                req.question,
                k=req.k,
                strategy=req.strategy,
                answer_strategy=req.answer_strategy,
            )
        except GoldfishError as exc:
            raise _http_error(exc)
        return response.as_dict()

    @app.get("/videos/{video_id}/retrieve")
    def retrieve(
        video_id: str,
        q: str = Query(min_length=1),
        k: int | None = None,
        strategy: str | None = None,
    ):
        try:
            scored = engine.retrieve_debug(video_id, q, strategy=strategy, k=k)
        except GoldfishError as exc:
            raise _http_error(exc)
        return {"video_id": video_id, "question": q, "scores": scored}

    @app.post("/benchmarks/run")
    def bench_run(req: BenchmarkRunRequest):
        try:
            items = load_clip_level_items(req.items_path)
            manifest = EpisodeManifest.from_file(req.manifest_path)
            if req.window:
                bench = build_window_variant(items, manifest, req.window)
            else:
                bench = build_episode_benchmark(items, manifest)
            if not bench:
                raise HTTPException(status_code=422, detail="benchmark is empty")
            report = run_benchmark(bench, manifest, engine, k=req.k)
        except FileNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except GoldfishError as exc:
            raise _http_error(exc)
        paths = write_report(report, req.out_dir)
        return {
            "summary": summary_lines(report),
            "accuracy": report.accuracy,
            "mean_score": report.mean_score,
            "retrieval_accuracy": report.retrieval_accuracy,
            "files": {name: str(p) for name, p in paths.items()},
        }

    return app


def serve(host: str = "127.0.0.1", port: int = 8765, config: EngineConfig | None = None):
    import uvicorn

    uvicorn.run(create_app(config=config), host=host, port=port)
