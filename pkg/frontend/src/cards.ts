import type { Hit } from "./types.js";
import { formatScore, formatSpan } from "./types.js";

/** Provenance cards: one per retrieved clip, best score first. Text
 * content is a strict pass-through of the service payload; visual
 * truncation of long summaries is left to CSS so the DOM text stays
 * byte-identical to the response. */
export function renderProvenanceCards(container: HTMLElement, hits: Hit[]): HTMLElement[] {
  container.textContent = "";
  const sorted = [...hits].sort((a, b) => b.score - a.score);
  return sorted.map((hit, i) => {
    const card = container.ownerDocument.createElement("article");
    card.className = "card";
    card.dataset.clipId = String(hit.clip_id);
    card.dataset.score = String(hit.score);
    card.dataset.rank = String(i + 1);

    const head = card.ownerDocument.createElement("header");
    const rank = el(card, "span", "card-rank", String(i + 1));
    head.appendChild(rank);
    head.appendChild(el(card, "span", "card-span", formatSpan(hit.start_ms, hit.end_ms)));
    head.appendChild(el(card, "span", "card-kind", hit.matched_kind));
    head.appendChild(el(card, "span", "card-score", formatScore(hit.score)));
    card.appendChild(head);

    card.appendChild(el(card, "p", "card-summary", hit.summary_text));
    container.appendChild(card);
    return card;
  });
}

function el(
  context: HTMLElement,
  tag: string,
  className: string,
  text: string,
): HTMLElement {
  const node = context.ownerDocument.createElement(tag);
  node.className = className;
  node.textContent = text;
  return node;
}
