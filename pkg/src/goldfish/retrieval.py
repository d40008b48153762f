"""Query-to-clip retrieval: cosine similarity over candidate keys under a
configurable fusion strategy, reduced to the top-k distinct clips.

Every video contributes two keys per clip (summary, subtitle). Strategies:

* ``subtitles`` / ``summary``: score only that key set.
* ``union`` ("or", the default): score all 2m keys independently; a clip
  reached through both keys is collapsed to its best-scoring key.
* ``concatenated`` ("and"): per clip, score the stacked
  [subtitle ; summary] vector against the duplicated query [q ; q], which
  reduces to the normalized sum of the per-part dot products.

Scoring is exact (full scan); clip counts per video are small enough that
nothing approximate is warranted.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .embedding import EmbeddingVector
from .errors import DimensionMismatch, EmptyIndex, ZeroVector
from .index import KeyKind, VideoIndex

DEFAULT_TOP_K = 3


class FusionStrategy(str, Enum):
    SUBTITLES_ONLY = "subtitles"
    SUMMARY_ONLY = "summary"
    CONCATENATED = "concatenated"
    UNION = "union"


DEFAULT_STRATEGY = FusionStrategy.UNION

# matched_kind values on hits; the first two coincide with KeyKind values.
KIND_SUMMARY = KeyKind.SUMMARY.value
KIND_SUBTITLE = KeyKind.SUBTITLE.value
KIND_CONCATENATED = "concatenated"

# Deterministic order for equal-scoring keys of the same clip.
_KIND_RANK = {KIND_SUMMARY: 0, KIND_SUBTITLE: 1, KIND_CONCATENATED: 2}


@dataclass(frozen=True)
class RetrievalQuery:
    question: str
    embedding: EmbeddingVector


@dataclass(frozen=True)
class RetrievalConfig:
    k: int = DEFAULT_TOP_K
    strategy: FusionStrategy = DEFAULT_STRATEGY

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class ScoredKey:
    clip_id: int
    kind: str
    score: float


@dataclass(frozen=True)
class RetrievalHit:
    clip_id: int
    score: float
    matched_kind: str


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two vectors: a.b / (|a| |b|).

    Accepts EmbeddingVector or any array-like; computed in float64.

    Raises:
        DimensionMismatch: lengths differ.
        ZeroVector: either vector has zero norm.
    """
    va = a.as_array() if isinstance(a, EmbeddingVector) else np.asarray(a, dtype=np.float64)
    vb = b.as_array() if isinstance(b, EmbeddingVector) else np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise DimensionMismatch(f"dims {va.shape[0]} vs {vb.shape[0]}")
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    return float(np.dot(va, vb) / (na * nb))


def score_keys(
    query: RetrievalQuery, index: VideoIndex, strategy: FusionStrategy = DEFAULT_STRATEGY
) -> list[ScoredKey]:
    """Score the query against every candidate key under the strategy.

    Returns one entry per key (two per clip under union, one otherwise),
    sorted by descending score with ties broken by clip id then kind.

    Raises:
        EmptyIndex: the index holds no clips.
    """
    if len(index) == 0:
        raise EmptyIndex(f"index for video {index.video_id!r} is empty")
    q = query.embedding.as_array()
    scored: list[ScoredKey] = []
    if strategy is FusionStrategy.CONCATENATED:
        qq = np.concatenate([q, q])
        for cid in index.clip_ids():
            sub = index.key_vector(cid, KeyKind.SUBTITLE).as_array()
            summ = index.key_vector(cid, KeyKind.SUMMARY).as_array()
            score = cosine_similarity(np.concatenate([sub, summ]), qq)
            scored.append(ScoredKey(clip_id=cid, kind=KIND_CONCATENATED, score=score))
    else:
        if strategy is FusionStrategy.SUBTITLES_ONLY:
            kinds = (KeyKind.SUBTITLE,)
        elif strategy is FusionStrategy.SUMMARY_ONLY:
            kinds = (KeyKind.SUMMARY,)
        else:
            kinds = (KeyKind.SUMMARY, KeyKind.SUBTITLE)
        for cid in index.clip_ids():
            for kind in kinds:
                vec = index.key_vector(cid, kind).as_array()
                scored.append(
                    ScoredKey(clip_id=cid, kind=kind.value, score=cosine_similarity(vec, q))
                )
    scored.sort(key=lambda s: (-s.score, s.clip_id, _KIND_RANK[s.kind]))
    return scored


def retrieve_top_k(
    query: RetrievalQuery,
    index: VideoIndex,
    config: RetrievalConfig | None = None,
) -> list[RetrievalHit]:
    """Return the k distinct clips with the highest best-key score.

    Under union a clip reachable through both keys appears once, at the
    score of its better key, labelled with that key's kind. Ties across
    clips go to the lower clip id; if fewer than k clips exist, all are
    returned.
    """
    config = config or RetrievalConfig()
    scored = score_keys(query, index, config.strategy)
    hits: list[RetrievalHit] = []
    seen: set[int] = set()
    for entry in scored:
        if entry.clip_id in seen:
            continue
        seen.add(entry.clip_id)
        hits.append(
            RetrievalHit(clip_id=entry.clip_id, score=entry.score, matched_kind=entry.kind)
        )
        if len(hits) == config.k:
            break
    return hits
