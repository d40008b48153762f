"""Goldfish: retrieval-augmented question answering over arbitrarily long
videos.

The pipeline segments a video into clips, describes each clip through a
pluggable vision-language backend, indexes summary and subtitle embeddings
per clip, retrieves the top-k clips for a question by cosine similarity,
and answers from the retrieved text via a separate chat backend.
"""

__version__ = "0.1.0"

from .answering import (
    Answer,
    AnswerContext,
    AnswerStrategy,
    McqQuestion,
    answer_mcq,
    answer_question,
    assemble_context,
)
from .benchmark import (
    BenchmarkItem,
    EpisodeManifest,
    EvalReport,
    JudgeVerdict,
    build_episode_benchmark,
    build_window_variant,
    compute_report,
    judge_open_ended,
    parse_judge_response,
)
from .config import EngineConfig, load_config
from .descriptor import (
    ClipDescription,
    DescriptorRequest,
    GroundedInfo,
    build_interleaved_prompt,
    describe_clip,
    extract_related_info,
)
from .embedding import EmbeddingVector, embed_text
from .engine import AskResponse, Engine, IngestJob
from .errors import GoldfishError
from .harness import run_benchmark
from .index import ClipRecord, IndexManifest, KeyKind, RetrievalKey, VideoIndex
from .mocks import MockDescriptorBackend, MockEmbeddingBackend, mock_describe
from .retrieval import (
    FusionStrategy,
    RetrievalConfig,
    RetrievalHit,
    RetrievalQuery,
    cosine_similarity,
    retrieve_top_k,
    score_keys,
)
from .segmentation import Clip, VideoSource, align_subtitles, segment_video
from .subtitles import SubtitleCue, SubtitleTrack, parse_subtitles, serialize_track

__all__ = [
    "__version__",
    "Answer",
    "AnswerContext",
    "AnswerStrategy",
    "AskResponse",
    "BenchmarkItem",
    "Clip",
    "ClipDescription",
    "ClipRecord",
    "DescriptorRequest",
    "EmbeddingVector",
    "Engine",
    "EngineConfig",
    "EpisodeManifest",
    "EvalReport",
    "FusionStrategy",
    "GoldfishError",
    "GroundedInfo",
    "IndexManifest",
    "IngestJob",
    "JudgeVerdict",
    "KeyKind",
    "McqQuestion",
    "MockDescriptorBackend",
    "MockEmbeddingBackend",
    "RetrievalConfig",
    "RetrievalHit",
    "RetrievalKey",
    "RetrievalQuery",
    "SubtitleCue",
    "SubtitleTrack",
    "VideoIndex",
    "VideoSource",
    "align_subtitles",
    "answer_mcq",
    "answer_question",
    "assemble_context",
    "build_episode_benchmark",
    "build_interleaved_prompt",
    "build_window_variant",
    "compute_report",
    "cosine_similarity",
    "describe_clip",
    "embed_text",
    "extract_related_info",
    "judge_open_ended",
    "load_config",
    "mock_describe",
    "parse_judge_response",
    "parse_subtitles",
    "retrieve_top_k",
    "run_benchmark",
    "score_keys",
    "segment_video",
    "serialize_track",
]
