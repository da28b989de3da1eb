/** Session controller: one in-flight request, FIFO queue, failure recovery.
 *
 * The session id lives in memory only; reloading the page starts over. A 404
 * (expired session) restarts the session transparently with an inline notice
 * and re-sends the message; a network failure marks the user bubble failed
 * and leaves a retry handle.
 */

import { ApiClient, SessionExpiredError } from "./api.js";
import { Transcript } from "./transcript.js";
import type { ChatMessage } from "./types.js";

export type SessionState = "connecting" | "ready" | "unavailable";

export type StateListener = (state: SessionState) => void;

const RESTART_NOTICE =
  "Your session expired, so a new one was started. Earlier context is gone.";

export class ChatSession {
  readonly transcript = new Transcript();
  private sessionId: string | null = null;
  private state: SessionState = "connecting";
  private stateListeners: StateListener[] = [];
  private queue: ChatMessage[] = [];
  private inFlight = false;

  constructor(private readonly api: ApiClient) {}

  onStateChange(listener: StateListener): void {
    this.stateListeners.push(listener);
    listener(this.state);
  }

  currentState(): SessionState {
    return this.state;
  }

  private setState(state: SessionState): void {
    this.state = state;
    for (const listener of this.stateListeners) {
      listener(state);
    }
  }

  /** Create the server-side session; flips to "unavailable" on failure. */
  async start(): Promise<boolean> {
    this.setState("connecting");
    try {
      this.sessionId = await this.api.createSession();
      this.setState("ready");
      return true;
    } catch {
      this.setState("unavailable");
      return false;
    }
  }

  /**
   * Queue one outgoing message (typed text or a button payload, verbatim).
   * The user bubble appears immediately; posts are serialized so bot
   * responses land in server order even when replies are slow.
   */
  send(text: string): ChatMessage {
    const message = this.transcript.addUserMessage(text);
    this.queue.push(message);
    void this.pump();
    return message;
  }

  /** Re-send a message that previously failed with a network error. */
  retry(message: ChatMessage): void {
    if (message.status !== "failed") {
      return;
    }
    this.transcript.setStatus(message.id, "pending");
    this.queue.push(message);
    void this.pump();
  }

  private async pump(): Promise<void> {
    if (this.inFlight) {
      return;
    }
    const message = this.queue.shift();
    if (!message) {
      return;
    }
    this.inFlight = true;
    try {
      await this.deliver(message);
    } finally {
      this.inFlight = false;
      void this.pump();
    }
  }

  private async deliver(message: ChatMessage, isRetryAfterRestart = false): Promise<void> {
    if (!this.sessionId) {
      this.transcript.setStatus(message.id, "failed");
      return;
    }
    try {
      const responses = await this.api.sendMessage(this.sessionId, message.text);
      this.transcript.setStatus(message.id, "sent");
      this.transcript.addBotResponses(responses);
    } catch (error) {
      if (error instanceof SessionExpiredError && !isRetryAfterRestart) {
        this.transcript.addNotice(RESTART_NOTICE);
        if (await this.start()) {
          await this.deliver(message, true);
          return;
        }
      }
      // Network failures and anything unexpected leave a retryable bubble.
      this.transcript.setStatus(message.id, "failed");
    }
  }
}
