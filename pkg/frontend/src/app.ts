/**
 * Web chat UI: a message thread and composer on the left, a live
 * NLU/policy debug panel on the right. All intelligence lives behind
 * the gateway; this file only renders what it returns.
 */

import { fetchDebug, sendMessage, type DebugView } from "./api.js";
import {
  currentSenderId,
  pushMessage,
  rotateSenderId,
  type ChatMessage,
} from "./state.js";

// ---------------------------------------------------------------------------
// Rendering helpers
// ---------------------------------------------------------------------------

function el(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) throw new Error(`element not found: ${id}`);
  return found;
}

function div(className: string, text?: string): HTMLDivElement {
  const node = document.createElement("div");
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** A labeled horizontal bar scaled to a 0..1 confidence. */
function confidenceBar(label: string, confidence: number): HTMLDivElement {
  const row = div("bar-row");
  row.appendChild(div("bar-label", label));
  const track = div("bar-track");
  const fill = div("bar-fill");
  fill.style.width = `${Math.max(0, Math.min(1, confidence)) * 100}%`;
  track.appendChild(fill);
  row.appendChild(track);
  row.appendChild(div("bar-value", confidence.toFixed(3)));
  return row;
}

function sectionTitle(text: string): HTMLDivElement {
  return div("debug-section-title", text);
}

// ---------------------------------------------------------------------------
// Debug panel
// ---------------------------------------------------------------------------

function renderDebugEmpty(panel: HTMLElement): void {
  panel.innerHTML = "";
  panel.appendChild(div("debug-empty", "no data"));
}

function renderDebug(panel: HTMLElement, view: DebugView): void {
  panel.innerHTML = "";

  panel.appendChild(sectionTitle("intent ranking"));
  view.intent_ranking.forEach((score, i) => {
    const row = confidenceBar(score.name, score.confidence);
    if (i === 0) row.classList.add("bar-row-top");
    panel.appendChild(row);
  });

  panel.appendChild(sectionTitle("entities"));
  if (view.entities.length === 0) {
    panel.appendChild(div("debug-muted", "none"));
  }
  for (const entity of view.entities) {
    const row = div("entity-row");
    row.appendChild(div("entity-type", entity.entity_type));
    row.appendChild(div("entity-value", `${entity.value} ("${entity.surface}")`));
    row.appendChild(div("entity-confidence", entity.confidence.toFixed(3)));
    panel.appendChild(row);
  }

  panel.appendChild(sectionTitle("policy"));
  if (view.policy) {
    panel.appendChild(
      div(
        "policy-line",
        `${view.policy.name} -> ${view.policy.action ?? "?"} (${view.policy.confidence.toFixed(2)})`,
      ),
    );
  } else {
    panel.appendChild(div("debug-muted", "none"));
  }
  panel.appendChild(div("policy-actions", view.actions.join(" > ")));

  panel.appendChild(sectionTitle("slots"));
  const slotNames = Object.keys(view.slots);
  if (slotNames.length === 0) {
    panel.appendChild(div("debug-muted", "empty"));
  }
  for (const name of slotNames) {
    const row = div("slot-row");
    row.appendChild(div("slot-name", name));
    row.appendChild(div("slot-value", view.slots[name] ?? "—"));
    panel.appendChild(row);
  }
}

// ---------------------------------------------------------------------------
// App wiring
// ---------------------------------------------------------------------------

export function initApp(): void {
  const threadEl = el("thread");
  const input = el("input") as HTMLInputElement;
  const sendBtn = el("send") as HTMLButtonElement;
  const resetBtn = el("reset") as HTMLButtonElement;
  const panel = el("debug-body");

  let sender = currentSenderId(window.sessionStorage);
  const thread: ChatMessage[] = [];
  let inFlight = false;
  // bumped on reset so in-flight replies from the old conversation are dropped
  let generation = 0;

  function appendBubble(author: ChatMessage["author"] | "error", text: string): void {
    if (author !== "error") pushMessage(thread, author, text);
    const bubble = div(`bubble bubble-${author}`, text);
    threadEl.appendChild(bubble);
    threadEl.scrollTop = threadEl.scrollHeight;
  }

  function updateSendState(): void {
    sendBtn.disabled = inFlight || input.value.trim().length === 0;
  }

  function setBusy(busy: boolean): void {
    inFlight = busy;
    input.disabled = busy;
    updateSendState();
  }

  async function refreshDebug(): Promise<void> {
    try {
      const view = await fetchDebug(sender);
      if (view === null) renderDebugEmpty(panel);
      else renderDebug(panel, view);
    } catch {
      // a flaky debug fetch should never break the chat itself
    }
  }

  async function handleSend(): Promise<void> {
    const text = input.value.trim();
    if (!text || inFlight) return;
    input.value = "";
    appendBubble("user", text);
    setBusy(true);
    const sentIn = generation;
    try {
      const replies = await sendMessage(sender, text);
      if (sentIn !== generation) return;
      for (const reply of replies) appendBubble("bot", reply.text);
      await refreshDebug();
    } catch {
      if (sentIn === generation) appendBubble("error", "could not reach the bot, try again");
    } finally {
      if (sentIn === generation) {
        setBusy(false);
        input.focus();
      }
    }
  }

  function handleReset(): void {
    generation += 1;
    sender = rotateSenderId(window.sessionStorage);
    thread.length = 0;
    threadEl.innerHTML = "";
    renderDebugEmpty(panel);
    setBusy(false);
    input.focus();
  }

  sendBtn.addEventListener("click", () => void handleSend());
  input.addEventListener("keydown", (event: KeyboardEvent) => {
    if (event.key === "Enter") {
      event.preventDefault();
      void handleSend();
    }
  });
  input.addEventListener("input", updateSendState);
  resetBtn.addEventListener("click", handleReset);

  updateSendState();
  renderDebugEmpty(panel);
  void refreshDebug();
}
