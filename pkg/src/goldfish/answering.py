"""Final-answer assembly: serialize the retrieved clips into a context
prompt and query the answer backend (a general-purpose chat model,
configured separately from the clip descriptor).

Three context strategies are supported:

* A (default): retrieved summaries and subtitles go to the backend as-is.
* B: the descriptor first extracts question-grounded info per clip; the
  context is that info plus the summaries (no subtitles).
* C: as B, with the subtitles added back.

A and not B/C is the default because question-grounded extraction invites
hallucinated info from unrelated clips, which drags accuracy down.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Protocol

from .descriptor import DescriptorBackend, GroundedInfo, extract_related_info
from .errors import EmptyResponse, NoHits, UnparseableChoice
from .index import ClipRecord
from .prompts import ANSWER_SYSTEM_PROMPT, MCQ_INSTRUCTION
from .retrieval import RetrievalHit
from .segmentation import Clip

UNKNOWN_OPTION = "I don't know"
MCQ_OPTION_COUNT = 5


class AnswerStrategy(str, Enum):
    A = "A"
    B = "B"
    C = "C"


DEFAULT_ANSWER_STRATEGY = AnswerStrategy.A


class AnswerBackend(Protocol):
    """Chat-completion style backend: system + user prompt in, text out."""

    id: str

    def complete(self, system: str, user: str) -> str: ...


@dataclass(frozen=True)
class ContextEntry:
    clip_id: int
    start_ms: int
    end_ms: int
    summary_text: str | None = None
    subtitle_text: str | None = None
    related_info: GroundedInfo | None = None


@dataclass(frozen=True)
class AnswerContext:
    question: str
    entries: tuple[ContextEntry, ...]


@dataclass(frozen=True)
class Answer:
    text: str
    used_clip_ids: tuple[int, ...]
    strategy: AnswerStrategy
    backend_id: str


@dataclass(frozen=True)
class McqQuestion:
    """Five-option multiple choice; the fifth option is always the
    appended unknown option."""

    stem: str
    options: tuple[str, ...]

    def __post_init__(self):
        if len(self.options) != MCQ_OPTION_COUNT:
            raise ValueError(f"expected {MCQ_OPTION_COUNT} options, got {len(self.options)}")
        if self.options[-1] != UNKNOWN_OPTION:
            raise ValueError(f"option 5 must be {UNKNOWN_OPTION!r}")

    @classmethod
    def with_unknown_option(cls, stem: str, options: list[str]) -> "McqQuestion":
        """Build from up to four content options, appending the unknown option."""
        if len(options) > MCQ_OPTION_COUNT - 1:
            raise ValueError("at most four content options are allowed")
        padded = list(options) + [""] * (MCQ_OPTION_COUNT - 1 - len(options))
        return cls(stem=stem, options=(*padded, UNKNOWN_OPTION))


def assemble_context(
    hits: list[RetrievalHit],
    records: Mapping[int, ClipRecord],
    strategy: AnswerStrategy,
    question: str,
    *,
    descriptor_backend: DescriptorBackend | None = None,
    clips: Mapping[int, Clip] | None = None,
) -> AnswerContext:
    """Build the answer context from the retrieved clips, in rank order.

    Strategies B and C call the descriptor backend once per hit to extract
    question-grounded info; strategy A never touches it.

    Raises:
        NoHits: the hit list is empty.
        ValueError: strategy B/C requested without a descriptor backend.
    """
    if not hits:
        raise NoHits("cannot assemble a context from zero hits")
    if strategy is not AnswerStrategy.A and descriptor_backend is None:
        raise ValueError(f"strategy {strategy.value} needs a descriptor backend")

    entries = []
    for hit in hits:
        record = records[hit.clip_id]
        related = None
        if strategy is not AnswerStrategy.A:
            clip = (clips or {}).get(hit.clip_id) or Clip(
                clip_id=record.clip_id,
                start_ms=record.start_ms,
                end_ms=record.end_ms,
                frame_indices=(0,),
                subtitle_text=record.subtitle_text,
            )
            related = extract_related_info(clip, question, descriptor_backend)
        entries.append(
            ContextEntry(
                clip_id=record.clip_id,
                start_ms=record.start_ms,
                end_ms=record.end_ms,
                summary_text=record.summary_text,
                subtitle_text=record.subtitle_text if strategy is not AnswerStrategy.B else None,
                related_info=related,
            )
        )
    return AnswerContext(question=question, entries=tuple(entries))


def _format_ms(ms: int) -> str:
    h, rem = divmod(ms, 3_600_000)
    mi, s = divmod(rem // 1000, 60)
    return f"{h:02d}:{mi:02d}:{s:02d}"


def render_context(context: AnswerContext) -> str:
    """Serialize entries in rank order, each prefixed with its time span."""
    blocks = []
    for entry in context.entries:
        lines = [f"[{_format_ms(entry.start_ms)} - {_format_ms(entry.end_ms)}] clip {entry.clip_id}"]
        if entry.related_info is not None:
            label = "Related info"
            if entry.related_info.is_dont_know:
                label += " (clip reports no relevant information)"
            lines.append(f"{label}: {entry.related_info.info_text}")
        if entry.summary_text is not None:
            lines.append(f"Summary: {entry.summary_text}")
        if entry.subtitle_text is not None:
            lines.append(f"Subtitles: {entry.subtitle_text or '(none)'}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks)


def answer_question(
    question: str,
    context: AnswerContext,
    llm_backend: AnswerBackend,
    strategy: AnswerStrategy = DEFAULT_ANSWER_STRATEGY,
) -> Answer:
    """Obtain the final answer for an open-ended question.

    Raises:
        NoHits: empty context (checked before any backend call).
        EmptyResponse: backend returned an empty string.
    """
    if not context.entries:
        raise NoHits("empty answer context")
    user = f"{render_context(context)}\n\nQuestion: {question}"
    text = llm_backend.complete(ANSWER_SYSTEM_PROMPT, user)
    if not text:
        raise EmptyResponse(f"answer backend {llm_backend.id!r} returned empty text")
    return Answer(
        text=text,
        used_clip_ids=tuple(e.clip_id for e in context.entries),
        strategy=strategy,
        backend_id=llm_backend.id,
    )


_OPTION_N = re.compile(r"\boption\s*#?\s*([1-5])\b", re.IGNORECASE)
_BARE_DIGIT = re.compile(r"^\(?([1-5])\)?[.:]?$")


def parse_choice(reply: str, options: tuple[str, ...]) -> int:
    """Map a backend reply to a 1-based option index.

    Accepted shapes, tried in order: "option N"; a bare digit; the
    verbatim text of an option (longest match wins when several options
    occur in the reply).

    Raises:
        UnparseableChoice: nothing matched.
    """
    m = _OPTION_N.search(reply)
    if m:
        return int(m.group(1))
    m = _BARE_DIGIT.match(reply.strip())
    if m:
        return int(m.group(1))
    lowered = reply.lower()
    matches = [
        (len(opt), i + 1)
        for i, opt in enumerate(options)
        if opt and opt.lower() in lowered
    ]
    if matches:
        longest = max(m[0] for m in matches)
        return min(i for length, i in matches if length == longest)
    raise UnparseableChoice(f"cannot map reply to an option: {reply!r}")


def answer_mcq(
    q: McqQuestion,
    context: AnswerContext,
    llm_backend: AnswerBackend,
    strategy: AnswerStrategy = DEFAULT_ANSWER_STRATEGY,
) -> int:
    """Answer a five-option MCQ; returns the chosen option index 1..5.

    Raises:
        UnparseableChoice: the backend reply matched no accepted shape.
    """
    if not context.entries:
        raise NoHits("empty answer context")
    option_lines = "\n".join(f"{i + 1}. {opt}" for i, opt in enumerate(q.options) if opt)
    user = (
        f"{render_context(context)}\n\n"
        f"Question: {q.stem}\n{option_lines}\n{MCQ_INSTRUCTION}"
    )
    reply = llm_backend.complete(ANSWER_SYSTEM_PROMPT, user)
    return parse_choice(reply, q.options)
