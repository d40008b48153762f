import type { AskResponse, ConversationTurn } from "./types.js";

const STORAGE_PREFIX = "goldfish.conversation.";

/** Conversation history for one video, persisted per browser session so
 * navigating away and back does not lose it. */
export class ConversationStore {
  private turns: ConversationTurn[] = [];

  constructor(
    public readonly videoId: string,
    private storage: Storage | null = defaultStorage(),
  ) {
    this.restore();
  }

  private key(): string {
    return STORAGE_PREFIX + this.videoId;
  }

  private restore(): void {
    if (!this.storage) return;
    const raw = this.storage.getItem(this.key());
    if (!raw) return;
    try {
      const parsed = JSON.parse(raw);
      if (Array.isArray(parsed)) this.turns = parsed;
    } catch {
      this.storage.removeItem(this.key());
    }
  }

  private persist(): void {
    this.storage?.setItem(this.key(), JSON.stringify(this.turns));
  }

  list(): readonly ConversationTurn[] {
    return this.turns;
  }

  append(question: string, response: AskResponse, timestamp = Date.now()): ConversationTurn {
    const last = this.turns[this.turns.length - 1];
    const turn: ConversationTurn = {
      question,
      answer: response.answer,
      // hits mirror the response exactly, order included
      hits: response.hits,
      timestamp: last ? Math.max(timestamp, last.timestamp) : timestamp,
    };
    this.turns.push(turn);
    this.persist();
    return turn;
  }

  clear(): void {
    this.turns = [];
    this.storage?.removeItem(this.key());
  }
}

function defaultStorage(): Storage | null {
  try {
    return typeof sessionStorage !== "undefined" ? sessionStorage : null;
  } catch {
    return null;
  }
}

type Task = () => Promise<void>;

/** Serializes asks: one in flight, later submissions run in FIFO order. */
export class AskQueue {
  private queue: Task[] = [];
  private busy = false;

  get pending(): number {
    return this.queue.length + (this.busy ? 1 : 0);
  }

  enqueue(task: Task): void {
    this.queue.push(task);
    void this.drain();
  }

  private async drain(): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      while (this.queue.length > 0) {
        const task = this.queue.shift()!;
        try {
          await task();
        } catch {
          // tasks own their error reporting; the queue keeps draining
        }
      }
    } finally {
      this.busy = false;
    }
  }
}
