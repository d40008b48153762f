"""Episode-level benchmark construction and scoring.

Clip-level QA items (each tied to one known ground-truth clip) are lifted
into long-video items in two ways: full-episode aggregation, or a sliding
window of n clips centered on the ground-truth clip (clamped at episode
boundaries). Scoring combines retrieval accuracy (is the ground-truth
clip among the top-k hits) with answer accuracy, judged either by MCQ
choice correctness or by an external judge model returning a yes/no plus
a 0-5 score.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Protocol, Sequence

from .errors import LengthMismatch, OrphanClip, UnparseableVerdict
from .prompts import JUDGE_SYSTEM_PROMPT, JUDGE_USER_TEMPLATE

DEFAULT_SOURCE_CLIP_MS = 60_000


@dataclass(frozen=True)
class SourceClip:
    """One short ground-truth clip as listed in an episode manifest."""

    clip_id: str
    duration_ms: int = DEFAULT_SOURCE_CLIP_MS
    subtitle_text: str = ""


@dataclass(frozen=True)
class Episode:
    episode_id: str
    clips: tuple[SourceClip, ...]

    def clip_position(self, clip_id: str) -> int | None:
        for i, clip in enumerate(self.clips):
            if clip.clip_id == clip_id:
                return i
        return None


@dataclass(frozen=True)
class EpisodeManifest:
    episodes: tuple[Episode, ...]

    def episode(self, episode_id: str) -> Episode | None:
        for ep in self.episodes:
            if ep.episode_id == episode_id:
                return ep
        return None

    @classmethod
    def from_dict(cls, payload: dict) -> "EpisodeManifest":
        episodes = []
        for ep in payload["episodes"]:
            clips = tuple(
                SourceClip(
                    clip_id=c["clip_id"],
                    duration_ms=int(c.get("duration_ms", DEFAULT_SOURCE_CLIP_MS)),
                    subtitle_text=c.get("subtitle_text", ""),
                )
                for c in ep["clips"]
            )
            episodes.append(Episode(episode_id=ep["episode_id"], clips=clips))
        return cls(episodes=tuple(episodes))

    @classmethod
    def from_file(cls, path: str | Path) -> "EpisodeManifest":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class ClipLevelItem:
    """One QA pair in the generic input format, tied to one source clip."""

    item_id: str
    episode_id: str
    clip_id: str
    question: str
    answer: str | int
    options: tuple[str, ...] | None = None


@dataclass(frozen=True)
class AggregatedVideo:
    """The long video a benchmark item is answered against: an ordered
    run of source clips from one episode."""

    video_id: str
    episode_id: str
    clip_ids: tuple[str, ...]

    def ordinal_of(self, clip_id: str) -> int | None:
        """1-based position of a source clip within this video."""
        try:
            return self.clip_ids.index(clip_id) + 1
        except ValueError:
            return None


@dataclass(frozen=True)
class BenchmarkItem:
    item_id: str
    episode_id: str
    question: str
    gt_answer: str | int
    gt_clip_id: str
    video_ref: AggregatedVideo
    options: tuple[str, ...] | None = None

    @property
    def is_mcq(self) -> bool:
        return self.options is not None


def load_clip_level_items(path: str | Path) -> list[ClipLevelItem]:
    """Read clip-level items from a JSON list or JSONL file."""
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        return []
    if text.startswith("["):
        rows = json.loads(text)
    else:
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    return [
        ClipLevelItem(
            item_id=str(r["item_id"]),
            episode_id=str(r["episode_id"]),
            clip_id=str(r["clip_id"]),
            question=r["question"],
            answer=r["answer"],
            options=tuple(r["options"]) if r.get("options") else None,
        )
        for r in rows
    ]


def _require_position(manifest: EpisodeManifest, item: ClipLevelItem) -> tuple[Episode, int]:
    episode = manifest.episode(item.episode_id)
    if episode is None:
        raise OrphanClip(
            f"item {item.item_id!r}: episode {item.episode_id!r} is not in the manifest"
        )
    pos = episode.clip_position(item.clip_id)
    if pos is None:
        raise OrphanClip(
            f"item {item.item_id!r}: clip {item.clip_id!r} is not listed in "
            f"episode {item.episode_id!r}"
        )
    return episode, pos


def build_episode_benchmark(
    clip_level_items: Sequence[ClipLevelItem], manifest: EpisodeManifest
) -> list[BenchmarkItem]:
    """Lift every clip-level item to the full episode it came from.

    Question text and the ground-truth clip identity are preserved; only
    the video reference widens.

    Raises:
        OrphanClip: an item references a clip in no episode.
    """
    out = []
    for item in clip_level_items:
        episode, _ = _require_position(manifest, item)
        video = AggregatedVideo(
            video_id=episode.episode_id,
            episode_id=episode.episode_id,
            clip_ids=tuple(c.clip_id for c in episode.clips),
        )
        out.append(
            BenchmarkItem(
                item_id=item.item_id,
                episode_id=item.episode_id,
                question=item.question,
                gt_answer=item.answer,
                gt_clip_id=item.clip_id,
                video_ref=video,
                options=item.options,
            )
        )
    return out


def window_span(position: int, episode_len: int, window_n: int) -> tuple[int, int]:
    """Half-open [start, end) positions of a window_n-clip window centered
    on ``position``, clamped at the episode boundaries."""
    w = min(window_n, episode_len)
    start = position - (w - 1) // 2
    start = max(0, min(start, episode_len - w))
    return start, start + w


def build_window_variant(
    clip_level_items: Sequence[ClipLevelItem],
    manifest: EpisodeManifest,
    window_n: int,
) -> list[BenchmarkItem]:
    """Lift every item to a window of ``window_n`` clips around its
    ground-truth clip (all clips, when the episode is shorter)."""
    if window_n < 1:
        raise ValueError("window_n must be >= 1")
    out = []
    for item in clip_level_items:
        episode, pos = _require_position(manifest, item)
        start, end = window_span(pos, len(episode.clips), window_n)
        clip_ids = tuple(c.clip_id for c in episode.clips[start:end])
        video = AggregatedVideo(
            video_id=f"{episode.episode_id}.w{window_n}.{clip_ids[0]}-{clip_ids[-1]}",
            episode_id=episode.episode_id,
            clip_ids=clip_ids,
        )
        out.append(
            BenchmarkItem(
                item_id=item.item_id,
                episode_id=item.episode_id,
                question=item.question,
                gt_answer=item.answer,
                gt_clip_id=item.clip_id,
                video_ref=video,
                options=item.options,
            )
        )
    return out


# --- judging ---


@dataclass(frozen=True)
class JudgeVerdict:
    pred: str  # "yes" | "no"
    score: int  # 0..5


class JudgeBackend(Protocol):
    id: str

    def complete(self, system: str, user: str) -> str: ...


_PRED = re.compile(r"['\"]?pred['\"]?\s*[:=]\s*['\"]?(yes|no)\b", re.IGNORECASE)
_SCORE = re.compile(r"['\"]?score['\"]?\s*[:=]\s*['\"]?(-?\d+(?:\.\d+)?)", re.IGNORECASE)


def parse_judge_response(text: str) -> JudgeVerdict:
    """Recover (pred, score) from a dictionary-style judge reply.

    Tolerates single or double quotes, prose around the dictionary, and
    fractional scores (rounded half-up, clamped to [0, 5]) — judges do not
    reliably honor the integer instruction.

    Raises:
        UnparseableVerdict: no pred/score pair found.
    """
    pred_m = _PRED.search(text)
    score_m = _SCORE.search(text)
    if pred_m is None or score_m is None:
        raise UnparseableVerdict(f"no pred/score pair in judge reply: {text!r}")
    score = int(Decimal(score_m.group(1)).to_integral_value(rounding=ROUND_HALF_UP))
    return JudgeVerdict(pred=pred_m.group(1).lower(), score=max(0, min(5, score)))


def judge_open_ended(
    question: str, gt_answer: str, prediction: str, judge_backend: JudgeBackend
) -> JudgeVerdict:
    """Score a predicted answer against ground truth with the judge model.

    Raises:
        UnparseableVerdict: the judge reply had no recoverable verdict.
    """
    for name, value in (("question", question), ("gt_answer", gt_answer), ("prediction", prediction)):
        if not value.strip():
            raise ValueError(f"{name} must be non-empty")
    user = JUDGE_USER_TEMPLATE.format(question=question, answer=gt_answer, pred=prediction)
    return parse_judge_response(judge_backend.complete(JUDGE_SYSTEM_PROMPT, user))


# --- report arithmetic ---


@dataclass(frozen=True)
class ItemOutcome:
    item_id: str
    gt_ordinal: int | None
    hit_clip_ids: tuple[int, ...]
    gt_rank: int | None
    correct: bool
    verdict: JudgeVerdict | None
    choice: int | None
    answer_text: str = ""
    error: str = ""


@dataclass
class EvalReport:
    n_items: int
    accuracy: float
    mean_score: float
    retrieval_accuracy: float
    per_item: list[ItemOutcome]
    k: int
    backends_unreachable: int = 0


def compute_report(
    items: Sequence[BenchmarkItem],
    hits_per_item: Sequence[Sequence[int]],
    verdicts_or_choices: Sequence[JudgeVerdict | int | None],
    k: int,
    *,
    answers: Sequence[str] | None = None,
    errors: Sequence[str] | None = None,
) -> EvalReport:
    """Reduce per-item results to the benchmark report.

    ``hits_per_item`` holds ranked clip ordinals per item. Per-item
    results are a JudgeVerdict (open-ended), a chosen option index (MCQ),
    or None for an unparseable result, which counts as incorrect but is
    excluded from the mean score.

    Raises:
        LengthMismatch: the three aligned sequences differ in length.
    """
    if not (len(items) == len(hits_per_item) == len(verdicts_or_choices)):
        raise LengthMismatch(
            f"items={len(items)}, hits={len(hits_per_item)}, "
            f"results={len(verdicts_or_choices)}"
        )
    per_item = []
    n_correct = 0
    n_retrieved = 0
    scores = []
    for i, (item, hits, result) in enumerate(zip(items, hits_per_item, verdicts_or_choices)):
        gt_ordinal = item.video_ref.ordinal_of(item.gt_clip_id)
        top = list(hits[:k])
        gt_rank = top.index(gt_ordinal) + 1 if gt_ordinal in top else None
        if gt_rank is not None:
            n_retrieved += 1

        correct = False
        verdict = None
        choice = None
        if isinstance(result, JudgeVerdict):
            verdict = result
            correct = result.pred == "yes"
            scores.append(result.score)
        elif isinstance(result, int):
            choice = result
            correct = result == item.gt_answer
        if correct:
            n_correct += 1
        per_item.append(
            ItemOutcome(
                item_id=item.item_id,
                gt_ordinal=gt_ordinal,
                hit_clip_ids=tuple(hits),
                gt_rank=gt_rank,
                correct=correct,
                verdict=verdict,
                choice=choice,
                answer_text=answers[i] if answers else "",
                error=errors[i] if errors else "",
            )
        )
    n = len(items)
    return EvalReport(
        n_items=n,
        accuracy=n_correct / n if n else 0.0,
        mean_score=sum(scores) / len(scores) if scores else 0.0,
        retrieval_accuracy=n_retrieved / n if n else 0.0,
        per_item=per_item,
        k=k,
    )
