import { describe, expect, it } from "vitest";

import { layoutTimeline, linkCardsToTimeline, renderTimeline } from "../src/timeline.js";
import { renderProvenanceCards } from "../src/cards.js";
import type { ClipInfo, Hit } from "../src/types.js";

function clips(n: number, eachMs = 60_000): ClipInfo[] {
  return Array.from({ length: n }, (_, i) => ({
    clip_id: i + 1,
    start_ms: i * eachMs,
    end_ms: (i + 1) * eachMs,
    summary_text: `summary ${i + 1}`,
    subtitle_text: `subs ${i + 1}`,
  }));
}

function hit(clipId: number, score: number): Hit {
  return {
    clip_id: clipId,
    score,
    matched_kind: "summary",
    start_ms: (clipId - 1) * 60_000,
    end_ms: clipId * 60_000,
    summary_text: `summary ${clipId}`,
  };
}

describe("layoutTimeline", () => {
  it("draws every clip proportionally by duration", () => {
    const uneven: ClipInfo[] = [
      { clip_id: 1, start_ms: 0, end_ms: 30_000, summary_text: "", subtitle_text: "" },
      { clip_id: 2, start_ms: 30_000, end_ms: 90_000, summary_text: "", subtitle_text: "" },
      { clip_id: 3, start_ms: 90_000, end_ms: 120_000, summary_text: "", subtitle_text: "" },
    ];
    const segments = layoutTimeline(uneven, []);
    expect(segments.map((s) => s.widthPct)).toEqual([25, 50, 25]);
    expect(segments.map((s) => s.leftPct)).toEqual([0, 25, 75]);
  });

  it("assigns rank badges 1..k by descending score", () => {
    const segments = layoutTimeline(clips(10), [hit(7, 0.9), hit(2, 0.7), hit(4, 0.5)]);
    const ranks = new Map(segments.map((s) => [s.clipId, s.rank]));
    expect(ranks.get(7)).toBe(1);
    expect(ranks.get(2)).toBe(2);
    expect(ranks.get(4)).toBe(3);
    expect(segments.filter((s) => s.rank !== null)).toHaveLength(3);
  });

  it("handles an empty clip list", () => {
    expect(layoutTimeline([], [])).toEqual([]);
  });
});

describe("renderTimeline", () => {
  it("renders 10 segments with 3 badges for 10 clips and 3 hits", () => {
    const container = document.createElement("div");
    renderTimeline(container, clips(10), [hit(1, 0.9), hit(5, 0.8), hit(9, 0.7)]);
    expect(container.querySelectorAll(".segment")).toHaveLength(10);
    expect(container.querySelectorAll(".badge")).toHaveLength(3);
  });

  it("badges the final segment when the last clip is a hit", () => {
    const container = document.createElement("div");
    const segments = renderTimeline(container, clips(10), [hit(10, 0.88)]);
    const last = segments.get(10)!;
    expect(last.querySelector(".badge")!.textContent).toBe("1");
    expect(container.lastElementChild).toBe(last);
  });
});

describe("card/timeline cross-highlighting", () => {
  function setup() {
    const cardBox = document.createElement("div");
    const timelineBox = document.createElement("div");
    const hits = [hit(3, 0.9), hit(8, 0.6)];
    const cards = renderProvenanceCards(cardBox, hits);
    const segments = renderTimeline(timelineBox, clips(10), hits);
    linkCardsToTimeline(cards, segments);
    return { cards, segments };
  }

  it("card click highlights the matching segment", () => {
    const { cards, segments } = setup();
    cards[0].dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(segments.get(3)!.classList.contains("active")).toBe(true);
    expect(cards[0].classList.contains("active")).toBe(true);
    expect(segments.get(8)!.classList.contains("active")).toBe(false);
  });

  it("segment click highlights the matching card and clears others", () => {
    const { cards, segments } = setup();
    cards[0].dispatchEvent(new MouseEvent("click", { bubbles: true }));
    segments.get(8)!.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(cards[1].classList.contains("active")).toBe(true);
    expect(cards[0].classList.contains("active")).toBe(false);
    expect(segments.get(3)!.classList.contains("active")).toBe(false);
  });
});
