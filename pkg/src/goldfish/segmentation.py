"""Timeline segmentation: split a video into fixed-duration clips and
align subtitle cues to them.

A long video is cut into non-overlapping windows that tile
``[0, duration_ms)`` exactly; within each window at most ``max_frames``
frame indices are sampled, evenly spaced with both span endpoints
included. Sampling is deterministic so repeated ingests are identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ZeroLengthVideo
from .subtitles import SubtitleTrack

DEFAULT_CLIP_WINDOW_MS = 90_000
DEFAULT_MAX_FRAMES = 45


@dataclass(frozen=True)
class VideoSource:
    """Reference to a video by URI plus the metadata needed to segment it.

    Frame payloads are never decoded here; they are passed to backends as
    opaque references.
    """

    id: str
    uri: str
    fps: float
    frame_count: int
    width: int = 0
    height: int = 0
    duration_ms: int = field(default=0)

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        if self.frame_count < 0:
            raise ValueError(f"frame_count must be non-negative, got {self.frame_count}")
        if self.duration_ms <= 0:
            object.__setattr__(
                self, "duration_ms", math.ceil(self.frame_count * 1000.0 / self.fps)
            )

    def frame_time_ms(self, index: int) -> float:
        return index * 1000.0 / self.fps


@dataclass(frozen=True)
class Clip:
    """One contiguous segment of a video, with its sampled frame indices
    and the subtitle text aligned to its time span."""

    clip_id: int
    start_ms: int
    end_ms: int
    frame_indices: tuple[int, ...] = ()
    subtitle_text: str = ""

    @property
    def span_ms(self) -> int:
        return self.end_ms - self.start_ms


def sample_indices(first: int, last: int, max_count: int) -> tuple[int, ...]:
    """Evenly sample at most ``max_count`` integers from [first, last].

    Both endpoints are included whenever the span holds at least two
    indices, and the result is strictly increasing.
    """
    span = last - first + 1
    if span <= 0:
        return ()
    n = min(span, max_count)
    if n == 1:
        return (first,)
    step = (span - 1) / (n - 1)  # >= 1, so rounded values never collide
    return tuple(first + round(j * step) for j in range(n))


def segment_video(
    source: VideoSource,
    clip_window_ms: int = DEFAULT_CLIP_WINDOW_MS,
    max_frames: int = DEFAULT_MAX_FRAMES,
) -> list[Clip]:
    """Cut the video into ceil(duration/window) clips and sample frames.

    Clip k (1-based) spans ``[(k-1)*window, min(k*window, duration))``.
    Frames are assigned to the clip whose span contains their timestamp,
    then uniformly downsampled to at most ``max_frames`` per clip.

    Raises:
        ZeroLengthVideo: the source has no frames.
    """
    if clip_window_ms <= 0:
        raise ValueError("clip_window_ms must be positive")
    if max_frames < 1:
        raise ValueError("max_frames must be at least 1")
    if source.frame_count == 0:
        raise ZeroLengthVideo(f"video {source.id!r} has no frames")

    duration = source.duration_ms
    m = math.ceil(duration / clip_window_ms)
    clips = []
    for k in range(1, m + 1):
        start = (k - 1) * clip_window_ms
        end = min(k * clip_window_ms, duration)
        first = max(0, math.ceil(start * source.fps / 1000.0))
        last = min(source.frame_count - 1, math.ceil(end * source.fps / 1000.0) - 1)
        clips.append(
            Clip(
                clip_id=k,
                start_ms=start,
                end_ms=end,
                frame_indices=sample_indices(first, last, max_frames),
            )
        )
    return clips


def align_subtitles(track: SubtitleTrack, clips: list[Clip]) -> list[Clip]:
    """Attach cue text to every clip whose time span overlaps the cue.

    A cue straddling a clip boundary lands in both adjacent clips; spoken
    content is never dropped at a cut. Clips with no overlapping cue get
    empty text.
    """
    out = []
    for clip in clips:
        texts = [
            cue.text
            for cue in track.cues
            if cue.start_ms < clip.end_ms and clip.start_ms < cue.end_ms
        ]
        out.append(replace(clip, subtitle_text=" ".join(texts)))
    return out
