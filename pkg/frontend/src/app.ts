import { ApiError, GoldfishClient, resolveBaseUrl } from "./api.js";
import { renderProvenanceCards } from "./cards.js";
import { AskQueue, ConversationStore } from "./state.js";
import { linkCardsToTimeline, renderTimeline } from "./timeline.js";
import type { ClipInfo, ConversationTurn } from "./types.js";

export interface AppElements {
  videoSelect: HTMLSelectElement;
  form: HTMLFormElement;
  questionInput: HTMLInputElement;
  submitButton: HTMLButtonElement;
  errorBanner: HTMLElement;
  timeline: HTMLElement;
  conversation: HTMLElement;
}

export class ChatApp {
  private store: ConversationStore | null = null;
  private clips: ClipInfo[] = [];
  private queue = new AskQueue();

  constructor(
    private client: GoldfishClient,
    private els: AppElements,
    private storage: Storage | null = null,
  ) {}

  async start(): Promise<void> {
    this.els.questionInput.addEventListener("input", () => this.syncSubmitState());
    this.els.form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.submit();
    });
    this.els.videoSelect.addEventListener("change", () => {
      void this.selectVideo(this.els.videoSelect.value);
    });
    this.syncSubmitState();
    try {
      const videos = await this.client.listVideos();
      this.els.videoSelect.textContent = "";
      for (const id of videos) {
        const option = this.els.videoSelect.ownerDocument.createElement("option");
        option.value = id;
        option.textContent = id;
        this.els.videoSelect.appendChild(option);
      }
      if (videos.length > 0) await this.selectVideo(videos[0]);
    } catch (err) {
      this.showError(err);
    }
  }

  async selectVideo(videoId: string): Promise<void> {
    if (!videoId) return;
    this.hideError();
    this.store = new ConversationStore(videoId, this.storage ?? undefined);
    try {
      this.clips = await this.client.clips(videoId);
    } catch (err) {
      this.clips = [];
      this.showError(err);
    }
    this.renderConversation();
    this.renderLatestTimeline();
  }

  /** Empty questions cannot be submitted; neither can anything while the
   * selected video is missing. Asks already in flight queue the next one
   * instead of firing in parallel. */
  private syncSubmitState(): void {
    const question = this.els.questionInput.value.trim();
    this.els.submitButton.disabled = question.length === 0 || this.store === null;
  }

  submit(): void {
    const store = this.store;
    const question = this.els.questionInput.value.trim();
    if (!store || question.length === 0) return;
    this.els.questionInput.value = "";
    this.syncSubmitState();
    this.queue.enqueue(async () => {
      try {
        const response = await this.client.ask(store.videoId, question);
        store.append(question, response);
        this.hideError();
        this.renderConversation();
        this.renderLatestTimeline();
      } catch (err) {
        this.showError(err);
      }
    });
  }

  private renderConversation(): void {
    const doc = this.els.conversation.ownerDocument;
    this.els.conversation.textContent = "";
    const turns = this.store?.list() ?? [];
    this.latestCards = [];
    for (const turn of turns) {
      const { node, cards } = this.renderTurn(doc, turn);
      this.els.conversation.appendChild(node);
      this.latestCards = cards;
    }
    this.els.conversation.scrollTop = this.els.conversation.scrollHeight;
  }

  private latestCards: HTMLElement[] = [];

  private renderTurn(
    doc: Document,
    turn: ConversationTurn,
  ): { node: HTMLElement; cards: HTMLElement[] } {
    const node = doc.createElement("section");
    node.className = "turn";
    const q = doc.createElement("p");
    q.className = "question";
    q.textContent = turn.question;
    node.appendChild(q);
    const a = doc.createElement("p");
    a.className = "answer";
    a.textContent = turn.answer;
    node.appendChild(a);
    const cardBox = doc.createElement("div");
    cardBox.className = "cards";
    node.appendChild(cardBox);
    return { node, cards: renderProvenanceCards(cardBox, turn.hits) };
  }

  /** The timeline always reflects the most recent turn's hits, and its
   * segments are cross-linked with that turn's cards. */
  private renderLatestTimeline(): void {
    const turns = this.store?.list() ?? [];
    const hits = turns.length > 0 ? turns[turns.length - 1].hits : [];
    const segments = renderTimeline(this.els.timeline, this.clips, hits);
    linkCardsToTimeline(this.latestCards, segments);
  }

  private showError(err: unknown): void {
    const message =
      err instanceof ApiError ? err.detail : err instanceof Error ? err.message : String(err);
    this.els.errorBanner.textContent = message;
    this.els.errorBanner.classList.remove("hidden");
  }

  private hideError(): void {
    this.els.errorBanner.textContent = "";
    this.els.errorBanner.classList.add("hidden");
  }
}

export function bootstrap(doc: Document, win: Window & typeof globalThis): ChatApp {
  const get = <T extends HTMLElement>(id: string): T => {
    const node = doc.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node as T;
  };
  const client = new GoldfishClient(resolveBaseUrl(win.location));
  const app = new ChatApp(
    client,
    {
      videoSelect: get<HTMLSelectElement>("video-select"),
      form: get<HTMLFormElement>("ask-form"),
      questionInput: get<HTMLInputElement>("question"),
      submitButton: get<HTMLButtonElement>("submit"),
      errorBanner: get("error-banner"),
      timeline: get("timeline"),
      conversation: get("conversation"),
    },
    win.sessionStorage,
  );
  void app.start();
  return app;
}

declare global {
  interface Window {
    __goldfishBootstrapped?: boolean;
  }
}

if (typeof document !== "undefined" && typeof window !== "undefined" && !window.__goldfishBootstrapped) {
  if (document.getElementById("ask-form")) {
    window.__goldfishBootstrapped = true;
    bootstrap(document, window);
  }
}
