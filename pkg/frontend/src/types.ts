// Wire types mirroring the service API. The UI is a pure view over these
// payloads: it must never display a score, span, or summary that differs
// from what the service returned.

export interface Hit {
  clip_id: number;
  score: number;
  matched_kind: string;
  start_ms: number;
  end_ms: number;
  summary_text: string;
}

export interface AskResponse {
  answer: string;
  hits: Hit[];
  strategy: string;
  timings_ms: Record<string, number>;
}

export interface ClipInfo {
  clip_id: number;
  start_ms: number;
  end_ms: number;
  summary_text: string;
  subtitle_text: string;
}

export interface IngestJob {
  job_id: string;
  video_id: string;
  state: string;
  progress: { done: number; total: number };
  error: string | null;
}

export interface ConversationTurn {
  question: string;
  answer: string;
  hits: Hit[];
  timestamp: number;
}

/** Format a millisecond offset as H:MM:SS for clip span labels. */
export function formatSpan(startMs: number, endMs: number): string {
  return `${formatMs(startMs)} - ${formatMs(endMs)}`;
}

export function formatMs(ms: number): string {
  const total = Math.floor(ms / 1000);
  const h = Math.floor(total / 3600);
  const m = Math.floor((total % 3600) / 60);
  const s = total % 60;
  return `${h}:${String(m).padStart(2, "0")}:${String(s).padStart(2, "0")}`;
}

/** Scores are displayed to three decimals; the exact value rides along in
 * a data attribute so nothing is lost to formatting. */
export function formatScore(score: number): string {
  return score.toFixed(3);
}
