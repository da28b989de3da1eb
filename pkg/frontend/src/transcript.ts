/** Ordered transcript model; the renderer subscribes, tests read it directly. */

import type {
  BotResponse,
  ChatMessage,
  MessageStatus,
  Notice,
  TranscriptEntry,
} from "./types.js";

export type TranscriptListener = (entries: readonly TranscriptEntry[]) => void;

export class Transcript {
  private entries: TranscriptEntry[] = [];
  private listeners: TranscriptListener[] = [];
  private nextId = 1;

  onChange(listener: TranscriptListener): void {
    this.listeners.push(listener);
  }

  all(): readonly TranscriptEntry[] {
    return this.entries;
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.entries);
    }
  }

  addUserMessage(text: string): ChatMessage {
    const message: ChatMessage = {
      id: this.nextId++,
      author: "user",
      text,
      timestamp: Date.now(),
      status: "pending",
    };
    this.entries.push(message);
    this.emit();
    return message;
  }

  addBotResponses(responses: BotResponse[]): void {
    for (const response of responses) {
      this.entries.push({
        id: this.nextId++,
        author: "bot",
        text: response.text,
        buttons: response.buttons,
        links: response.links,
        timestamp: Date.now(),
        status: "sent",
      });
    }
    this.emit();
  }

  addNotice(text: string): Notice {
    const notice: Notice = {
      id: this.nextId++,
      kind: "notice",
      text,
      timestamp: Date.now(),
    };
    this.entries.push(notice);
    this.emit();
    return notice;
  }

  setStatus(messageId: number, status: MessageStatus): void {
    const entry = this.entries.find(
      (e) => !("kind" in e) && e.id === messageId,
    ) as ChatMessage | undefined;
    if (entry) {
      entry.status = status;
      this.emit();
    }
  }
}
