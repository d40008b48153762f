"""Converter from the TVQA question layout to the generic benchmark format.

TVQA rows carry a question, five answer texts (a0..a4), the correct index,
and the short-clip name (e.g. "castle_s01e02_seg02_clip_11"). Episodes are
recovered by grouping clip names on their prefix before "_seg". Since the
engine presents four content options plus the appended unknown option, the
fifth distractor is dropped; when the ground truth sits at index 4 it is
first swapped into the kept range so no item loses its answer.
"""
from __future__ import annotations

import json
import re
from pathlib import Path

from .benchmark import DEFAULT_SOURCE_CLIP_MS

_EPISODE = re.compile(r"^(?P<episode>.+?)_seg\d+", re.IGNORECASE)


def episode_of(vid_name: str) -> str:
    m = _EPISODE.match(vid_name)
    return m.group("episode") if m else vid_name


def convert_tvqa_items(rows: list[dict]) -> list[dict]:
    """Map native TVQA rows to generic clip-level item records."""
    items = []
    for row in rows:
        options = [row[f"a{i}"] for i in range(5)]
        answer_idx = int(row["answer_idx"])
        if answer_idx == 4:
            options[3], options[4] = options[4], options[3]
            answer_idx = 3
        items.append(
            {
                "item_id": str(row.get("qid", len(items))),
                "episode_id": episode_of(row["vid_name"]),
                "clip_id": row["vid_name"],
                "question": row["q"],
                "options": options[:4],
                "answer": answer_idx + 1,  # 1-based option index
            }
        )
    return items


def build_tvqa_manifest(
    rows: list[dict],
    subtitles: dict[str, str] | None = None,
    clip_duration_ms: int = DEFAULT_SOURCE_CLIP_MS,
) -> dict:
    """Episode manifest from the clip names seen in the QA rows.

    TVQA does not ship clip durations in the QA files, so a uniform
    duration is assumed; per-clip subtitle text may be supplied separately.
    """
    episodes: dict[str, list[str]] = {}
    for row in rows:
        vid = row["vid_name"]
        episodes.setdefault(episode_of(vid), [])
        if vid not in episodes[episode_of(vid)]:
            episodes[episode_of(vid)].append(vid)
    subtitles = subtitles or {}
    return {
        "episodes": [
            {
                "episode_id": ep,
                "clips": [
                    {
                        "clip_id": vid,
                        "duration_ms": clip_duration_ms,
                        "subtitle_text": subtitles.get(vid, ""),
                    }
                    for vid in sorted(vids)
                ],
            }
            for ep, vids in sorted(episodes.items())
        ]
    }


def convert_tvqa_file(
    qa_path: str | Path,
    items_out: str | Path,
    manifest_out: str | Path,
    subtitles_path: str | Path | None = None,
) -> tuple[int, int]:
    """Convert a TVQA jsonl file; returns (n_items, n_episodes)."""
    rows = [
        json.loads(line)
        for line in Path(qa_path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    subtitles = None
    if subtitles_path:
        subtitles = json.loads(Path(subtitles_path).read_text(encoding="utf-8"))
    items = convert_tvqa_items(rows)
    manifest = build_tvqa_manifest(rows, subtitles)
    Path(items_out).write_text(
        "\n".join(json.dumps(item, ensure_ascii=False) for item in items) + "\n",
        encoding="utf-8",
    )
    Path(manifest_out).write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2), encoding="utf-8"
    )
    return len(items), len(manifest["episodes"])
