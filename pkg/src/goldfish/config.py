"""Engine configuration.

Precedence, highest first: explicit overrides (CLI flags) > environment
variables > config file (``GOLDFISH_CONFIG`` or ``--config``) > shipped
defaults. The shipped defaults are the best ablation settings: top-3
retrieval, union fusion, answer strategy A, 45 frames per clip.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

import yaml

from .answering import AnswerStrategy
from .retrieval import FusionStrategy
from .segmentation import DEFAULT_CLIP_WINDOW_MS, DEFAULT_MAX_FRAMES

ENV_PREFIX = "GOLDFISH_"
CONFIG_ENV_VAR = "GOLDFISH_CONFIG"


@dataclass
class EngineConfig:
    descriptor_endpoint: str = "mock://descriptor"
    descriptor_api_key: str = ""
    embedding_endpoint: str = "mock://embedding"
    embedding_api_key: str = ""
    embedding_model: str = "text-embedding-3-small"
    answer_endpoint: str = "mock://answer"
    answer_api_key: str = ""
    answer_model: str = "llama-2-7b-chat"
    answer_temperature: float = 0.0
    judge_endpoint: str = "mock://judge"
    judge_api_key: str = ""
    judge_model: str = "gpt-3.5-turbo"
    k: int = 3
    fusion: FusionStrategy = FusionStrategy.UNION
    answer_strategy: AnswerStrategy = AnswerStrategy.A
    clip_window_ms: int = DEFAULT_CLIP_WINDOW_MS
    max_frames: int = DEFAULT_MAX_FRAMES
    describe_with_subtitles: bool = True
    parallelism: int = 4
    index_dir: str = "goldfish_data"
    index_cache_size: int = 16
    retries: int = 3
    backoff_s: float = 0.5

    def __post_init__(self):
        if isinstance(self.fusion, str):
            self.fusion = FusionStrategy(self.fusion)
        if isinstance(self.answer_strategy, str):
            self.answer_strategy = AnswerStrategy(self.answer_strategy)
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        for name in ("descriptor", "embedding", "answer", "judge"):
            endpoint = getattr(self, f"{name}_endpoint")
            if "://" not in endpoint:
                raise ValueError(f"{name}_endpoint is not a URI: {endpoint!r}")


_FIELD_TYPES = {f.name: f.type for f in fields(EngineConfig)}


def _coerce(name: str, value: Any) -> Any:
    if value is None:
        return None
    ftype = _FIELD_TYPES[name]
    if ftype == "int":
        return int(value)
    if ftype == "float":
        return float(value)
    if ftype == "bool":
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    return value


def load_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> EngineConfig:
    """Resolve the effective configuration.

    ``path`` falls back to $GOLDFISH_CONFIG; the file is YAML (JSON is
    accepted, being a YAML subset) with keys matching EngineConfig fields.
    Environment variables are the field names upper-cased with the
    GOLDFISH_ prefix, e.g. GOLDFISH_INDEX_DIR, GOLDFISH_EMBEDDING_ENDPOINT.
    """
    env = os.environ if env is None else env
    merged: dict[str, Any] = {}

    file_path = path or env.get(CONFIG_ENV_VAR)
    if file_path:
        loaded = yaml.safe_load(Path(file_path).read_text(encoding="utf-8")) or {}
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {file_path} must hold a mapping")
        for key, value in loaded.items():
            if key in _FIELD_TYPES:
                merged[key] = _coerce(key, value)

    for name in _FIELD_TYPES:
        env_value = env.get(ENV_PREFIX + name.upper())
        if env_value is not None:
            merged[name] = _coerce(name, env_value)

    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = _coerce(key, value)

    return EngineConfig(**merged)
