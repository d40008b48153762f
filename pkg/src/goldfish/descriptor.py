"""Clip description via a pluggable vision-language backend.

The backend receives an interleaved frame/subtitle request: each frame
reference is immediately followed by the subtitle text spoken at that
frame (empty when nothing is spoken), with the instruction appended after
all pairs. Backends are a protocol, not a model: anything exposing
``describe(request) -> str`` and an ``id`` works, including the
deterministic mock used throughout the test suite.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Protocol

from .errors import BackendUnavailable, EmptyClip, EmptyResponse
from .prompts import DONT_KNOW_MARKER, RELATED_INFO_TEMPLATE, SUMMARY_PROMPT
from .segmentation import Clip
from .subtitles import SubtitleTrack

MAX_PROMPT_FRAMES = 45

DEFAULT_RETRIES = 3
DEFAULT_BACKOFF_S = 0.5


@dataclass(frozen=True)
class DescriptorRequest:
    """Interleaved frame/subtitle prompt for one clip."""

    clip_id: int
    frame_refs: tuple[str, ...]
    per_frame_subtitles: tuple[str, ...]
    instruction: str

    def __post_init__(self):
        if len(self.frame_refs) != len(self.per_frame_subtitles):
            raise ValueError(
                f"{len(self.frame_refs)} frame refs but "
                f"{len(self.per_frame_subtitles)} subtitle slots"
            )
        if len(self.frame_refs) > MAX_PROMPT_FRAMES:
            raise ValueError(
                f"{len(self.frame_refs)} frames exceeds the prompt cap of "
                f"{MAX_PROMPT_FRAMES}"
            )

    def render(self) -> str:
        """Flatten to the tagged prompt string (frame marker, then its
        subtitle, for every frame in order, instruction last)."""
        parts = ["<s>[INST]"]
        for ref, sub in zip(self.frame_refs, self.per_frame_subtitles):
            parts.append(f"<Img><{ref}>")
            if sub:
                parts.append(f"<Sub><{sub}>")
        parts.append(f"<Instruction>{self.instruction}[/INST]")
        return "".join(parts)


@dataclass(frozen=True)
class ClipDescription:
    clip_id: int
    summary_text: str
    backend_id: str
    latency_ms: float = 0.0


@dataclass(frozen=True)
class GroundedInfo:
    """Question-conditioned information extracted from one clip."""

    clip_id: int
    question: str
    info_text: str
    is_dont_know: bool


class DescriptorBackend(Protocol):
    id: str

    def describe(self, request: DescriptorRequest) -> str: ...


def frame_ref(uri: str, index: int) -> str:
    """Opaque reference to one frame payload, resolved by the backend."""
    return f"{uri}#{index}"


def contains_dont_know(text: str) -> bool:
    return DONT_KNOW_MARKER.lower() in text.lower()


def build_interleaved_prompt(
    clip: Clip,
    track: SubtitleTrack,
    instruction: str = SUMMARY_PROMPT,
    *,
    fps: float,
    uri: str = "",
) -> DescriptorRequest:
    """Build the frame/subtitle request for one clip.

    Each sampled frame gets the text of the cues overlapping its timestamp
    (frame index / fps), so the backend sees dialogue in step with the
    frames it accompanies.

    Raises:
        EmptyClip: the clip has no sampled frames.
    """
    if not clip.frame_indices:
        raise EmptyClip(f"clip {clip.clip_id} has no frames")
    # frames lie inside the clip span, so only span-overlapping cues matter
    relevant = [
        cue
        for cue in track.cues
        if cue.start_ms < clip.end_ms and clip.start_ms < cue.end_ms
    ]
    subs = []
    for idx in clip.frame_indices:
        t = idx * 1000.0 / fps
        texts = [cue.text for cue in relevant if cue.start_ms <= t < cue.end_ms]
        subs.append(" ".join(texts))
    return DescriptorRequest(
        clip_id=clip.clip_id,
        frame_refs=tuple(frame_ref(uri, i) for i in clip.frame_indices),
        per_frame_subtitles=tuple(subs),
        instruction=instruction,
    )


def _call_with_retry(
    backend: DescriptorBackend,
    request: DescriptorRequest,
    retries: int,
    backoff_s: float,
    sleep: Callable[[float], None],
) -> tuple[str, float]:
    attempt = 0
    start = time.perf_counter()
    while True:
        try:
            text = backend.describe(request)
            break
        except BackendUnavailable:
            if attempt >= retries:
                raise
            sleep(backoff_s * 2**attempt)
            attempt += 1
    latency_ms = (time.perf_counter() - start) * 1000.0
    if not text:
        raise EmptyResponse(f"backend {backend.id!r} returned empty text")
    return text, latency_ms


def describe_clip(
    request: DescriptorRequest,
    backend: DescriptorBackend,
    *,
    retries: int = DEFAULT_RETRIES,
    backoff_s: float = DEFAULT_BACKOFF_S,
    sleep: Callable[[float], None] = time.sleep,
) -> ClipDescription:
    """Fetch the clip summary, retrying transient failures.

    BackendUnavailable is retried up to ``retries`` times with exponential
    backoff; BackendRejected is not retried.

    Raises:
        BackendUnavailable: still failing after all retries.
        BackendRejected: backend refused the request.
        EmptyResponse: backend returned an empty string.
    """
    text, latency_ms = _call_with_retry(backend, request, retries, backoff_s, sleep)
    return ClipDescription(
        clip_id=request.clip_id,
        summary_text=text,
        backend_id=backend.id,
        latency_ms=latency_ms,
    )


def extract_related_info(
    clip: Clip,
    question: str,
    backend: DescriptorBackend,
    *,
    uri: str = "",
    retries: int = DEFAULT_RETRIES,
    backoff_s: float = DEFAULT_BACKOFF_S,
    sleep: Callable[[float], None] = time.sleep,
) -> GroundedInfo:
    """Ask the backend what the clip says about the question.

    The backend is instructed to reply with the don't-know marker when the
    clip is unrelated; the marker is detected case-insensitively and
    surfaced as ``is_dont_know``.
    """
    if not question.strip():
        raise ValueError("question must be non-empty")
    refs = tuple(frame_ref(uri, i) for i in clip.frame_indices)
    request = DescriptorRequest(
        clip_id=clip.clip_id,
        frame_refs=refs,
        per_frame_subtitles=(clip.subtitle_text,) * len(refs),
        instruction=RELATED_INFO_TEMPLATE.format(question=question),
    )
    text, _ = _call_with_retry(backend, request, retries, backoff_s, sleep)
    return GroundedInfo(
        clip_id=clip.clip_id,
        question=question,
        info_text=text,
        is_dont_know=contains_dont_know(text),
    )


__all__ = [
    "MAX_PROMPT_FRAMES",
    "DescriptorRequest",
    "ClipDescription",
    "GroundedInfo",
    "DescriptorBackend",
    "build_interleaved_prompt",
    "describe_clip",
    "extract_related_info",
    "contains_dont_know",
    "frame_ref",
]
