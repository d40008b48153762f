import type { ClipInfo, Hit } from "./types.js";

export interface TimelineSegment {
  clipId: number;
  leftPct: number;
  widthPct: number;
  rank: number | null; // 1..k when the clip was retrieved
}

/** Pure layout: every clip becomes a segment sized proportionally to its
 * duration; retrieved clips get their retrieval rank (1 = best score). */
export function layoutTimeline(clips: ClipInfo[], hits: Hit[]): TimelineSegment[] {
  if (clips.length === 0) return [];
  const total = clips.reduce((acc, c) => acc + (c.end_ms - c.start_ms), 0);
  const ranked = [...hits].sort((a, b) => b.score - a.score);
  const rankOf = new Map<number, number>();
  ranked.forEach((hit, i) => {
    if (!rankOf.has(hit.clip_id)) rankOf.set(hit.clip_id, i + 1);
  });
  let offset = 0;
  return clips.map((clip) => {
    const width = clip.end_ms - clip.start_ms;
    const segment: TimelineSegment = {
      clipId: clip.clip_id,
      leftPct: (offset / total) * 100,
      widthPct: (width / total) * 100,
      rank: rankOf.get(clip.clip_id) ?? null,
    };
    offset += width;
    return segment;
  });
}

/** Render segments into the container; returns them keyed by clip id. */
export function renderTimeline(
  container: HTMLElement,
  clips: ClipInfo[],
  hits: Hit[],
): Map<number, HTMLElement> {
  container.textContent = "";
  const byClip = new Map<number, HTMLElement>();
  for (const segment of layoutTimeline(clips, hits)) {
    const node = container.ownerDocument.createElement("div");
    node.className = segment.rank === null ? "segment" : "segment hit";
    node.style.left = `${segment.leftPct}%`;
    node.style.width = `${segment.widthPct}%`;
    node.dataset.clipId = String(segment.clipId);
    if (segment.rank !== null) {
      const badge = container.ownerDocument.createElement("span");
      badge.className = "badge";
      badge.textContent = String(segment.rank);
      node.appendChild(badge);
    }
    container.appendChild(node);
    byClip.set(segment.clipId, node);
  }
  return byClip;
}

/** Two-way linking: clicking a card highlights (and scrolls to) its
 * timeline segment; clicking a segment highlights its cards. */
export function linkCardsToTimeline(
  cards: HTMLElement[],
  segments: Map<number, HTMLElement>,
): void {
  const clearActive = () => {
    for (const node of segments.values()) node.classList.remove("active");
    for (const card of cards) card.classList.remove("active");
  };
  for (const card of cards) {
    card.addEventListener("click", () => {
      const clipId = Number(card.dataset.clipId);
      clearActive();
      card.classList.add("active");
      const segment = segments.get(clipId);
      if (segment) {
        segment.classList.add("active");
        segment.scrollIntoView?.({ behavior: "smooth", block: "nearest", inline: "center" });
      }
    });
  }
  for (const [clipId, segment] of segments) {
    segment.addEventListener("click", () => {
      clearActive();
      segment.classList.add("active");
      for (const card of cards) {
        if (Number(card.dataset.clipId) === clipId) {
          card.classList.add("active");
          card.scrollIntoView?.({ behavior: "smooth", block: "nearest" });
        }
      }
    });
  }
}
