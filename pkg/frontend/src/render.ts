/** DOM rendering: message bubbles, quick-reply chips, dataset link cards.
 *
 * All message content goes through textContent, never innerHTML. Dataset
 * links open the original portal in a new tab. The text input stays enabled
 * while buttons are shown; chips are just a shortcut for typing the payload.
 */

import type { ChatSession } from "./session.js";
import type { ChatMessage, TranscriptEntry } from "./types.js";
import { isNotice } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderEntry(
  entry: TranscriptEntry,
  onSend: (text: string) => void,
  onRetry: (message: ChatMessage) => void,
): HTMLElement {
  if (isNotice(entry)) {
    return el("div", "notice", entry.text);
  }
  const bubble = el("div", `bubble bubble-${entry.author}`);
  bubble.dataset.messageId = String(entry.id);
  bubble.appendChild(el("div", "bubble-text", entry.text));
  if (entry.author === "bot" && entry.buttons && entry.buttons.length > 0) {
    const chips = el("div", "chips");
    for (const button of entry.buttons) {
      const chip = el("button", "chip", button.title);
      chip.type = "button";
      chip.dataset.payload = button.payload;
      chip.addEventListener("click", () => onSend(button.payload));
      chips.appendChild(chip);
    }
    bubble.appendChild(chips);
  }
  if (entry.author === "bot" && entry.links && entry.links.length > 0) {
    const cards = el("div", "links");
    for (const link of entry.links) {
      const anchor = el("a", "link-card", link.title);
      anchor.href = link.url;
      anchor.target = "_blank";
      anchor.rel = "noopener noreferrer";
      cards.appendChild(anchor);
    }
    bubble.appendChild(cards);
  }
  if (entry.status === "failed") {
    bubble.classList.add("failed");
    const retry = el("button", "retry", "Retry");
    retry.type = "button";
    retry.addEventListener("click", () => onRetry(entry));
    bubble.appendChild(retry);
  }
  return bubble;
}

export class ChatView {
  private transcriptNode: HTMLElement;
  private banner: HTMLElement;
  private input: HTMLInputElement;
  private sendButton: HTMLButtonElement;

  constructor(
    root: HTMLElement,
    private readonly session: ChatSession,
  ) {
    root.replaceChildren();
    this.banner = el("div", "banner");
    this.banner.hidden = true;
    this.transcriptNode = el("div", "transcript");
    const composer = el("form", "composer");
    this.input = el("input", "composer-input");
    this.input.placeholder = "Type a message";
    this.sendButton = el("button", "composer-send", "Send");
    this.sendButton.type = "submit";
    composer.append(this.input, this.sendButton);
    composer.addEventListener("submit", (event) => {
      event.preventDefault();
      const text = this.input.value.trim();
      if (text && !this.input.disabled) {
        this.input.value = "";
        this.session.send(text);
      }
    });
    root.append(this.banner, this.transcriptNode, composer);

    session.transcript.onChange((entries) => this.renderTranscript(entries));
    session.onStateChange((state) => {
      const unavailable = state !== "ready";
      this.input.disabled = unavailable;
      this.sendButton.disabled = unavailable;
      this.banner.hidden = state === "ready";
      if (state === "connecting") {
        this.banner.textContent = "Connecting ...";
        this.banner.replaceChildren("Connecting ...");
      } else if (state === "unavailable") {
        this.banner.replaceChildren("Service unavailable. ");
        const retry = el("button", "banner-retry", "Retry");
        retry.type = "button";
        retry.addEventListener("click", () => void this.session.start());
        this.banner.appendChild(retry);
      }
    });
    this.renderTranscript(session.transcript.all());
  }

  private renderTranscript(entries: readonly TranscriptEntry[]): void {
    this.transcriptNode.replaceChildren(
      ...entries.map((entry) =>
        renderEntry(
          entry,
          (text) => this.session.send(text),
          (message) => this.session.retry(message),
        ),
      ),
    );
    this.transcriptNode.scrollTop = this.transcriptNode.scrollHeight;
  }
}
