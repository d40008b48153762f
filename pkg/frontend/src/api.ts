import type { AskResponse, ClipInfo, IngestJob } from "./types.js";

export interface AskOptions {
  k?: number;
  strategy?: string;
  answerStrategy?: string;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseError(resp: Response): Promise<never> {
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, detail);
}

/** Thin client over the service HTTP API. No response field is reshaped:
 * callers receive exactly what the service sent. */
export class GoldfishClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async health(): Promise<{ status: string; version: string }> {
    const resp = await this.fetchFn(this.url("/health"));
    if (!resp.ok) await parseError(resp);
    return resp.json();
  }

  async listVideos(): Promise<string[]> {
    const resp = await this.fetchFn(this.url("/videos"));
    if (!resp.ok) await parseError(resp);
    return (await resp.json()).videos;
  }

  async clips(videoId: string): Promise<ClipInfo[]> {
    const resp = await this.fetchFn(this.url(`/videos/${encodeURIComponent(videoId)}/clips`));
    if (!resp.ok) await parseError(resp);
    return (await resp.json()).clips;
  }

  async job(jobId: string): Promise<IngestJob> {
    const resp = await this.fetchFn(this.url(`/jobs/${encodeURIComponent(jobId)}`));
    if (!resp.ok) await parseError(resp);
    return resp.json();
  }

  async ask(videoId: string, question: string, options: AskOptions = {}): Promise<AskResponse> {
    const body: Record<string, unknown> = { question };
    if (options.k !== undefined) body.k = options.k;
    if (options.strategy !== undefined) body.strategy = options.strategy;
    if (options.answerStrategy !== undefined) body.answer_strategy = options.answerStrategy;
    const resp = await this.fetchFn(this.url(`/videos/${encodeURIComponent(videoId)}/ask`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) await parseError(resp);
    return resp.json();
  }
}

/** Service base URL: ?api=... wins, else same origin. */
export function resolveBaseUrl(location: Location): string {
  const fromQuery = new URLSearchParams(location.search).get("api");
  return fromQuery || location.origin;
}
