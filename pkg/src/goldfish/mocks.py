"""Deterministic mock backends.

These stand in for the vision-language descriptor, the text encoder, the
answer model, and the judge so the whole pipeline can run offline with
byte-reproducible output. They are wired in whenever an endpoint uses the
``mock://`` scheme.
"""
from __future__ import annotations

import hashlib
import re

import numpy as np

from .descriptor import ClipDescription, DescriptorRequest
from .prompts import DONT_KNOW_MARKER
from .segmentation import Clip

_TOKEN = re.compile(r"[a-z0-9'-]+")

_STOPWORDS = frozenset(
    "a an and are at be but by does did do for from has have how i in is it of on "
    "or that the this to was what when where which who whom why will with".split()
)

_NO_ANSWER = "I don't have enough information to answer."


def _tokens(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def _content_tokens(text: str) -> set[str]:
    return {t for t in _tokens(text) if t not in _STOPWORDS and len(t) > 1}


def _digest(*parts) -> str:
    h = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8"))
    return h.hexdigest()[:12]


def _summary_text(clip_id: int, subtitle_text: str, frame_indices) -> str:
    base = f"Clip {clip_id} shows scene {_digest(clip_id, subtitle_text, tuple(frame_indices))}."
    if subtitle_text:
        base += f" Dialogue: {subtitle_text}"
    return base


def mock_describe(clip: Clip) -> ClipDescription:
    """Deterministic stand-in for the descriptor: the summary is a pure
    function of (clip id, subtitle text, frame indices), with the subtitle
    text echoed so content tokens survive into the summary."""
    return ClipDescription(
        clip_id=clip.clip_id,
        summary_text=_summary_text(clip.clip_id, clip.subtitle_text, clip.frame_indices),
        backend_id=MockDescriptorBackend.ID,
        latency_ms=0.0,
    )


_QUESTION_IN_INSTRUCTION = re.compile(
    r"the question is:\s*(.*?)\s*your answer:", re.IGNORECASE | re.DOTALL
)


class MockDescriptorBackend:
    """Descriptor mock: summaries digest the request content; grounded-info
    requests answer from subtitle-token overlap or report the don't-know
    marker for unrelated questions."""

    ID = "mock-descriptor"

    def __init__(self):
        self.id = self.ID
        self.calls = 0

    @staticmethod
    def _frame_indices(request: DescriptorRequest) -> list[int]:
        indices = []
        for i, ref in enumerate(request.frame_refs):
            tail = ref.rsplit("#", 1)[-1]
            indices.append(int(tail) if tail.isdigit() else i)
        return indices

    @staticmethod
    def _subtitle_blob(request: DescriptorRequest) -> str:
        parts: list[str] = []
        for sub in request.per_frame_subtitles:
            if sub and (not parts or parts[-1] != sub):
                parts.append(sub)
        return " ".join(parts)

    def describe(self, request: DescriptorRequest) -> str:
        self.calls += 1
        blob = self._subtitle_blob(request)
        question_m = _QUESTION_IN_INSTRUCTION.search(request.instruction)
        if question_m:
            overlap = _content_tokens(question_m.group(1)) & _content_tokens(blob)
            if overlap:
                return (
                    f"The clip mentions {', '.join(sorted(overlap))}. "
                    f"Context: {blob}"
                )
            return DONT_KNOW_MARKER
        return _summary_text(request.clip_id, blob, self._frame_indices(request))


class MockEmbeddingBackend:
    """Bag-of-tokens encoder: each token maps to a fixed pseudo-random
    direction seeded from (encoder id, token); a text embeds to the unit
    sum of its token vectors. Texts sharing tokens score higher under
    cosine, which is enough structure for retrieval to be meaningful."""

    def __init__(self, dim: int = 256, encoder_id: str = "mock-bow"):
        self.dim = dim
        self.id = f"{encoder_id}-{dim}"
        self._cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        vec = self._cache.get(token)
        if vec is None:
            seed = int.from_bytes(
                hashlib.blake2b(f"{self.id}|{token}".encode(), digest_size=8).digest(),
                "big",
            )
            vec = np.random.default_rng(seed).standard_normal(self.dim)
            vec /= np.linalg.norm(vec)
            self._cache[token] = vec
        return vec

    def encode(self, texts: list[str]) -> list[list[float]]:
        out = []
        for text in texts:
            tokens = _tokens(text) or [text]
            total = np.zeros(self.dim)
            for token in tokens:
                total += self._token_vector(token)
            norm = np.linalg.norm(total)
            if norm == 0.0:
                total = self._token_vector(text)
                norm = 1.0
            out.append((total / norm).astype(np.float32).tolist())
        return out


class KeywordAnswerBackend:
    """Answer mock: returns the first context line sharing a content token
    with the question, or an explicit insufficiency message."""

    ID = "mock-keyword-answer"

    def __init__(self):
        self.id = self.ID
        self.calls = 0

    def complete(self, system: str, user: str) -> str:
        self.calls += 1
        context, _, tail = user.rpartition("\nQuestion:")
        question = tail.splitlines()[0] if tail else user
        wanted = _content_tokens(question)
        best_line, best_overlap = None, 0
        for line in context.splitlines():
            body = line.split(": ", 1)[-1]
            overlap = len(wanted & _content_tokens(body))
            if overlap > best_overlap:
                best_line, best_overlap = body, overlap
        return best_line if best_line is not None else _NO_ANSWER


_GT_LINE = re.compile(r"^Correct Answer:\s*(.*)$", re.MULTILINE)
_PRED_LINE = re.compile(r"^Predicted Answer:\s*(.*)$", re.MULTILINE)


class MockJudgeBackend:
    """Judge mock: token-overlap grading, replying in the dictionary-style
    string format the real judge is instructed to use."""

    ID = "mock-judge"

    def __init__(self):
        self.id = self.ID

    def complete(self, system: str, user: str) -> str:
        gt_m = _GT_LINE.search(user)
        pred_m = _PRED_LINE.search(user)
        gt = _content_tokens(gt_m.group(1)) if gt_m else set()
        pred = _content_tokens(pred_m.group(1)) if pred_m else set()
        ratio = len(gt & pred) / len(gt) if gt else 0.0
        verdict = "yes" if ratio >= 0.5 else "no"
        score = round(5 * ratio)
        return f"{{'pred': '{verdict}', 'score': {score}}}"
