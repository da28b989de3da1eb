/** Thin fetch wrapper around the chat service API with typed failures. */

import type { BotResponse } from "./types.js";

export class ServiceUnavailableError extends Error {
  constructor() {
    super("service is still loading");
    this.name = "ServiceUnavailableError";
  }
}

export class SessionExpiredError extends Error {
  constructor(sessionId: string) {
    super(`session ${sessionId} unknown or expired`);
    this.name = "SessionExpiredError";
  }
}

export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`request failed: ${String(cause)}`);
    this.name = "NetworkError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async post(path: string, body?: unknown): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new NetworkError(cause);
    }
    if (response.status === 503) {
      throw new ServiceUnavailableError();
    }
    return response;
  }

  async createSession(): Promise<string> {
    const response = await this.post("/api/sessions");
    if (!response.ok) {
      throw new NetworkError(`unexpected status ${response.status}`);
    }
    const body = (await response.json()) as { session_id: string };
    return body.session_id;
  }

  async sendMessage(sessionId: string, text: string): Promise<BotResponse[]> {
    const response = await this.post(
      `/api/sessions/${encodeURIComponent(sessionId)}/messages`,
      { text },
    );
    if (response.status === 404) {
      throw new SessionExpiredError(sessionId);
    }
    if (!response.ok) {
      throw new NetworkError(`unexpected status ${response.status}`);
    }
    const body = (await response.json()) as { responses: BotResponse[] };
    return body.responses;
  }
}
