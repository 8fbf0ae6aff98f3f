/**
 * Gateway client. The UI talks to exactly two endpoints and displays
 * their payloads verbatim; no scoring or parsing happens client-side.
 */

// ---------------------------------------------------------------------------
// Wire types
// ---------------------------------------------------------------------------

/** One reply from POST /webhooks/rest/webhook. */
export interface BotReply {
  recipient_id: string;
  text: string;
}

export interface IntentScore {
  name: string;
  confidence: number;
}

export interface DebugEntity {
  entity_type: string;
  value: string;
  surface: string;
  start: number;
  end: number;
  confidence: number;
}

export interface DebugPolicy {
  name: string;
  action: string | null;
  confidence: number;
}

/** GET /conversations/{sender}/debug, exactly as the gateway sends it. */
export interface DebugView {
  sender: string;
  intent: IntentScore;
  intent_ranking: IntentScore[];
  entities: DebugEntity[];
  policy: DebugPolicy | null;
  actions: string[];
  slots: Record<string, string | null>;
}

// ---------------------------------------------------------------------------
// Calls
// ---------------------------------------------------------------------------

export async function sendMessage(sender: string, message: string): Promise<BotReply[]> {
  const res = await fetch("/webhooks/rest/webhook", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ sender, message }),
  });
  if (!res.ok) {
    throw new Error(`send failed with status ${res.status}`);
  }
  return (await res.json()) as BotReply[];
}

/** Null until the sender has spoken at least once (the gateway 404s). */
export async function fetchDebug(sender: string): Promise<DebugView | null> {
  const res = await fetch(`/conversations/${encodeURIComponent(sender)}/debug`);
  if (res.status === 404) return null;
  if (!res.ok) {
    throw new Error(`debug fetch failed with status ${res.status}`);
  }
  return (await res.json()) as DebugView;
}
