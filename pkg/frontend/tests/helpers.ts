/** Test doubles: a scripted in-memory chat service behind the fetch API. */

import type { FetchLike } from "../src/api.js";
import type { BotResponse, TranscriptEntry } from "../src/types.js";
import { isNotice } from "../src/types.js";

export interface StubOptions {
  /** Maps an incoming message text to the bot responses for it. */
  script: (text: string) => BotResponse[];
  /** Per-message artificial latency in ms. */
  delayFor?: (text: string) => number;
  /** Return true to answer 503 (service still loading). */
  unavailable?: () => boolean;
  /** Session ids that should answer 404. */
  expiredSessions?: Set<string>;
  /** Throw a network error for these message texts (once each). */
  failOnce?: Set<string>;
}

export interface StubService {
  fetch: FetchLike;
  sessionsCreated: string[];
  messagesSeen: { sessionId: string; text: string }[];
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export function makeStubService(options: StubOptions): StubService {
  const sessionsCreated: string[] = [];
  const messagesSeen: { sessionId: string; text: string }[] = [];

  const json = (status: number, body: unknown) =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });

  const stubFetch: FetchLike = async (input, init) => {
    const url = new URL(input);
    if (options.unavailable?.()) {
      return json(503, { status: "loading" });
    }
    if (url.pathname === "/api/sessions" && init?.method === "POST") {
      const id = `session-${sessionsCreated.length + 1}`;
      sessionsCreated.push(id);
      return json(200, { session_id: id });
    }
    const match = url.pathname.match(/^\/api\/sessions\/([^/]+)\/messages$/);
    if (match && init?.method === "POST") {
      const sessionId = decodeURIComponent(match[1]!);
      const { text } = JSON.parse(String(init.body)) as { text: string };
      if (options.failOnce?.has(text)) {
        options.failOnce.delete(text);
        throw new TypeError("network down");
      }
      if (options.expiredSessions?.has(sessionId)) {
        return json(404, { detail: "unknown session" });
      }
      const delay = options.delayFor?.(text) ?? 0;
      if (delay > 0) {
        await sleep(delay);
      }
      messagesSeen.push({ sessionId, text });
      return json(200, { responses: options.script(text) });
    }
    return json(404, { detail: "no such route" });
  };

  return { fetch: stubFetch, sessionsCreated, messagesSeen };
}

/** Poll until the predicate holds (or fail after ~2s). */
export async function waitFor(predicate: () => boolean): Promise<void> {
  for (let i = 0; i < 200; i++) {
    if (predicate()) {
      return;
    }
    await sleep(10);
  }
  throw new Error("condition never became true");
}

/** Transcript stripped of ids and timestamps, for equality comparison. */
export function signature(entries: readonly TranscriptEntry[]): unknown[] {
  return entries.map((entry) =>
    isNotice(entry)
      ? { notice: entry.text }
      : {
          author: entry.author,
          text: entry.text,
          buttons: entry.buttons ?? [],
          links: entry.links ?? [],
          status: entry.status,
        },
  );
}
