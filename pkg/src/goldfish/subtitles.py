"""SubRip (.srt) and WebVTT (.vtt) parsing with millisecond timestamps.

Cue text is normalized on the way in: HTML-style markup is stripped and
whitespace is collapsed to single spaces, since the embedding backends
downstream are markup-agnostic.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MalformedTimestamp

_SRT_TIME = re.compile(r"^(\d{2,}):(\d{2}):(\d{2}),(\d{3})$")
_VTT_TIME = re.compile(r"^(?:(\d{2,}):)?(\d{2}):(\d{2})\.(\d{3})$")
_TAG = re.compile(r"<[^>]+>")
_WS = re.compile(r"\s+")


@dataclass(frozen=True)
class SubtitleCue:
    index: int
    start_ms: int
    end_ms: int
    text: str


@dataclass(frozen=True)
class SubtitleTrack:
    cues: tuple[SubtitleCue, ...] = ()

    def __len__(self) -> int:
        return len(self.cues)


def _clean_text(raw: str) -> str:
    return _WS.sub(" ", _TAG.sub("", raw)).strip()


def _parse_timestamp(token: str, pattern: re.Pattern, fmt: str) -> int:
    m = pattern.match(token.strip())
    if m is None:
        raise MalformedTimestamp(f"bad {fmt} timestamp: {token!r}")
    h, mi, s, ms = (int(g) if g is not None else 0 for g in m.groups())
    return h * 3_600_000 + mi * 60_000 + s * 1_000 + ms


def _parse_time_line(line: str, fmt: str) -> tuple[int, int]:
    parts = line.split("-->")
    if len(parts) != 2:
        raise MalformedTimestamp(f"bad time line: {line!r}")
    pattern = _SRT_TIME if fmt == "srt" else _VTT_TIME
    # WebVTT allows cue settings after the end timestamp.
    end_token = parts[1].strip().split(" ")[0]
    return (
        _parse_timestamp(parts[0], pattern, fmt),
        _parse_timestamp(end_token, pattern, fmt),
    )


def parse_subtitles(raw: str, format: str = "srt") -> SubtitleTrack:
    """Parse subtitle text into a track of normalized cues.

    Cues come back sorted by start time (input order preserved on ties)
    with sequential indices. Cues that are empty after markup stripping,
    or whose end does not lie after their start, are dropped. An input
    with no cues is not an error; it yields an empty track.

    Raises:
        MalformedTimestamp: a line containing ``-->`` failed to parse.
        ValueError: unknown format name.
    """
    if format not in ("srt", "vtt"):
        raise ValueError(f"unknown subtitle format: {format!r}")

    text = raw.lstrip("﻿").replace("\r\n", "\n").replace("\r", "\n")
    lines = text.split("\n")

    cues: list[tuple[int, int, str]] = []
    i = 0
    n = len(lines)
    while i < n:
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if format == "vtt" and (
            line.startswith("WEBVTT") or line.startswith("NOTE") or line.startswith("STYLE")
        ):
            # Skip the header/comment block through its blank-line terminator.
            while i < n and lines[i].strip():
                i += 1
            continue
        if "-->" not in line:
            # SRT cue counter or VTT cue identifier; the time line follows.
            i += 1
            if i >= n or "-->" not in lines[i]:
                continue
            line = lines[i].strip()
        start_ms, end_ms = _parse_time_line(line, format)
        i += 1
        body: list[str] = []
        while i < n and lines[i].strip():
            body.append(lines[i])
            i += 1
        cue_text = _clean_text(" ".join(body))
        if cue_text and start_ms < end_ms:
            cues.append((start_ms, end_ms, cue_text))

    cues.sort(key=lambda c: c[0])  # stable: ties keep input order
    return SubtitleTrack(
        cues=tuple(
            SubtitleCue(index=i, start_ms=s, end_ms=e, text=t)
            for i, (s, e, t) in enumerate(cues)
        )
    )


def _format_ms(ms: int, sep: str) -> str:
    h, rem = divmod(ms, 3_600_000)
    mi, rem = divmod(rem, 60_000)
    s, milli = divmod(rem, 1_000)
    return f"{h:02d}:{mi:02d}:{s:02d}{sep}{milli:03d}"


def serialize_track(track: SubtitleTrack, format: str = "srt") -> str:
    """Render a track in canonical form (parse of the output is a fixed point)."""
    if format == "srt":
        blocks = [
            f"{cue.index + 1}\n"
            f"{_format_ms(cue.start_ms, ',')} --> {_format_ms(cue.end_ms, ',')}\n"
            f"{cue.text}"
            for cue in track.cues
        ]
        return "\n\n".join(blocks) + ("\n" if blocks else "")
    if format == "vtt":
        blocks = [
            f"{_format_ms(cue.start_ms, '.')} --> {_format_ms(cue.end_ms, '.')}\n{cue.text}"
            for cue in track.cues
        ]
        return "WEBVTT\n\n" + "\n\n".join(blocks) + ("\n" if blocks else "")
    raise ValueError(f"unknown subtitle format: {format!r}")
