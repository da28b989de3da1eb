/** Page bootstrap: wire the API client, session, and view together. */

import { ApiClient } from "./api.js";
import { ChatView } from "./render.js";
import { ChatSession } from "./session.js";

declare global {
  interface Window {
    ODBOT_API_BASE?: string;
  }
}

const DEFAULT_API_BASE = "http://localhost:8000";

export function bootstrap(root: HTMLElement, apiBase?: string): ChatSession {
  const base = apiBase ?? window.ODBOT_API_BASE ?? DEFAULT_API_BASE;
  const session = new ChatSession(new ApiClient(base));
  new ChatView(root, session);
  void session.start();
  return session;
}

const mount = document.getElementById("chat-root");
if (mount) {
  bootstrap(mount);
}
