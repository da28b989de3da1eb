/** Wire types of the chat service HTTP API, plus the local transcript model. */

export interface ApiButton {
  title: string;
  payload: string;
}

export interface ApiLink {
  title: string;
  url: string;
}

/** One bot response object as delivered by POST /api/sessions/{id}/messages. */
export interface BotResponse {
  text: string;
  buttons: ApiButton[];
  links: ApiLink[];
}

export type MessageStatus = "pending" | "sent" | "failed";

export interface ChatMessage {
  id: number;
  author: "user" | "bot";
  text: string;
  /** Only present on bot messages; clicking sends the payload verbatim. */
  buttons?: ApiButton[];
  links?: ApiLink[];
  timestamp: number;
  /** Delivery state; only user messages can be pending or failed. */
  status: MessageStatus;
}

/** Inline system notice (session restarts etc.); not a chat bubble proper. */
export interface Notice {
  id: number;
  kind: "notice";
  text: string;
  timestamp: number;
}

export type TranscriptEntry = ChatMessage | Notice;

export function isNotice(entry: TranscriptEntry): entry is Notice {
  return (entry as Notice).kind === "notice";
}
