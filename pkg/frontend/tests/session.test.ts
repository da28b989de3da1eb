/** Session lifecycle: unavailable service, expiry recovery, failed sends. */

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ChatView } from "../src/render.js";
import { ChatSession } from "../src/session.js";
import { isNotice } from "../src/types.js";
import { makeStubService, waitFor } from "./helpers.js";

const echo = (text: string) => [{ text: `echo ${text}`, buttons: [], links: [] }];

beforeEach(() => {
  document.body.replaceChildren();
});

function mount(session: ChatSession) {
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  new ChatView(root, session);
  return root;
}

describe("service availability", () => {
  it("healthy service enables the input", async () => {
    const stub = makeStubService({ script: echo });
    const session = new ChatSession(new ApiClient("http://stub.test", stub.fetch));
    const root = mount(session);
    await session.start();
    expect(root.querySelector<HTMLInputElement>(".composer-input")!.disabled).toBe(false);
    expect(root.querySelector<HTMLElement>(".banner")!.hidden).toBe(true);
  });

  it("503 shows a retry banner and disables the input until recovery", async () => {
    let loading = true;
    const stub = makeStubService({ script: echo, unavailable: () => loading });
    const session = new ChatSession(new ApiClient("http://stub.test", stub.fetch));
    const root = mount(session);
    await session.start();
    const input = root.querySelector<HTMLInputElement>(".composer-input")!;
    const banner = root.querySelector<HTMLElement>(".banner")!;
    expect(input.disabled).toBe(true);
    expect(banner.hidden).toBe(false);

    loading = false;
    banner.querySelector<HTMLButtonElement>(".banner-retry")!.click();
    await waitFor(() => session.currentState() === "ready");
    expect(input.disabled).toBe(false);
    expect(banner.hidden).toBe(true);
  });
});

describe("session expiry", () => {
  it("auto-restarts with an inline notice and re-sends the message", async () => {
    const expired = new Set<string>();
    const stub = makeStubService({ script: echo, expiredSessions: expired });
    const session = new ChatSession(new ApiClient("http://stub.test", stub.fetch));
    mount(session);
    await session.start();
    expired.add(stub.sessionsCreated[0]!); // expire it behind the client's back

    session.send("are you there?");
    await waitFor(() =>
      session.transcript.all().some((e) => !isNotice(e) && e.author === "bot"),
    );

    expect(stub.sessionsCreated).toHaveLength(2);
    const kinds = session.transcript.all().map((entry) =>
      isNotice(entry) ? "notice" : `${entry.author}:${entry.status}`,
    );
    expect(kinds).toEqual(["user:sent", "notice", "bot:sent"]);
    expect(stub.messagesSeen).toEqual([
      { sessionId: stub.sessionsCreated[1], text: "are you there?" },
    ]);
  });
});

describe("network failures", () => {
  it("marks the message failed and retries on demand", async () => {
    const failOnce = new Set(["flaky"]);
    const stub = makeStubService({ script: echo, failOnce });
    const session = new ChatSession(new ApiClient("http://stub.test", stub.fetch));
    const root = mount(session);
    await session.start();

    session.send("flaky");
    await waitFor(() =>
      session.transcript.all().some((e) => !isNotice(e) && e.status === "failed"),
    );
    const failedBubble = root.querySelector<HTMLElement>(".bubble.failed")!;
    expect(failedBubble).not.toBeNull();

    failedBubble.querySelector<HTMLButtonElement>(".retry")!.click();
    await waitFor(() =>
      session.transcript.all().some((e) => !isNotice(e) && e.author === "bot"),
    );
    const statuses = session.transcript
      .all()
      .map((entry) => (isNotice(entry) ? "notice" : entry.status));
    expect(statuses).toEqual(["sent", "sent"]);
  });
});
