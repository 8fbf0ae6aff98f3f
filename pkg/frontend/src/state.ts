/**
 * Conversation state: the per-tab sender id and the message thread.
 * The sender id is an opaque random token kept in session storage, so
 * every tab is its own conversation and a reload keeps the thread's
 * identity while a reset rotates it.
 */

export interface ChatMessage {
  author: "user" | "bot";
  text: string;
  sentAt: number;
}

/** The subset of the Storage interface the session needs. */
export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const SENDER_KEY = "dialogforge.sender";

export function randomSenderId(): string {
  const noise = Math.random().toString(36).slice(2, 10);
  return `web-${noise}${Date.now().toString(36)}`;
}

/** Read the tab's sender id, minting one on first use. */
export function currentSenderId(store: KeyValueStore): string {
  const existing = store.getItem(SENDER_KEY);
  if (existing) return existing;
  const minted = randomSenderId();
  store.setItem(SENDER_KEY, minted);
  return minted;
}

/** Mint and persist a fresh sender id, abandoning the old conversation. */
export function rotateSenderId(store: KeyValueStore): string {
  const minted = randomSenderId();
  store.setItem(SENDER_KEY, minted);
  return minted;
}

/** Append in send order; the thread renders in array order. */
export function pushMessage(
  thread: ChatMessage[],
  author: ChatMessage["author"],
  text: string,
  now: () => number = Date.now,
): ChatMessage {
  const message: ChatMessage = { author, text, sentAt: now() };
  thread.push(message);
  return message;
}
