"""HTTP serving surface: Messenger-compatible webhook, a REST channel
for scripted clients and the web chat, a per-conversation debug
endpoint, and a health probe.

Messages are acknowledged immediately and processed afterwards; each
sender id is routed through its own lock so replies to message n are
sent before message n+1 from the same sender is touched. Credentials
come from a flat ``key=value`` file with environment overrides and are
kept out of logs and debug responses.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import requests
from fastapi import BackgroundTasks, FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .dialogue import Engine, handle_message

log = logging.getLogger(__name__)

VERIFY_TOKEN_ENV = "VERIFY_TOKEN"
PAGE_ACCESS_TOKEN_ENV = "PAGE_ACCESS_TOKEN"
GRAPH_API_BASE = "https://graph.facebook.com/v11.0"


class SendError(Exception):
    """A send-API call failed."""


@dataclass(frozen=True)
class Credentials:
    verify_token: str = ""
    page_access_token: str = ""

    def __repr__(self) -> str:  # secrets stay out of logs and tracebacks
        return "Credentials(verify_token='***', page_access_token='***')"


def load_credentials(path: str | Path | None = None, env: dict | None = None) -> Credentials:
    """Read ``verify_token=``/``page_access_token=`` lines, then let the
    environment override either value."""
    import os

    values = {"verify_token": "", "page_access_token": ""}
    if path is not None:
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"credentials file line {lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip()
            if key in values:
                values[key] = value.strip()
    env = os.environ if env is None else env
    if env.get(VERIFY_TOKEN_ENV):
        values["verify_token"] = env[VERIFY_TOKEN_ENV]
    if env.get(PAGE_ACCESS_TOKEN_ENV):
        values["page_access_token"] = env[PAGE_ACCESS_TOKEN_ENV]
    return Credentials(**values)


class _RedactSecrets(logging.Filter):
    """Replaces credential values in anything this module logs."""

    def __init__(self, secrets: list[str]):
        super().__init__()
        self._secrets = [s for s in secrets if s]

    def filter(self, record: logging.LogRecord) -> bool:
        message = record.getMessage()
        for secret in self._secrets:
            if secret in message:
                message = message.replace(secret, "[redacted]")
        record.msg, record.args = message, ()
        return True


@dataclass(frozen=True)
class InboundMessage:
    channel: str  # "facebook" or "rest"
    sender_id: str
    text: str
    received_at: float


def webhook_receive(payload: dict) -> list[InboundMessage]:
    """Pull the text-bearing events out of a Messenger page-event
    payload. Delivery receipts, read receipts and other event kinds are
    ignored; a postback's payload string counts as message text."""
    if not isinstance(payload, dict):
        raise ValueError("webhook payload must be a JSON object")
    messages: list[InboundMessage] = []
    for entry in payload.get("entry", []):
        for event in entry.get("messaging", []):
            sender = event.get("sender", {}).get("id")
            if not sender:
                continue
            text = None
            if "message" in event:
                text = event["message"].get("text")
            elif "postback" in event:
                text = event["postback"].get("payload")
            if not text or not text.strip():
                continue
            stamp = event.get("timestamp")
            received = stamp / 1000.0 if isinstance(stamp, (int, float)) else time.time()
            messages.append(
                InboundMessage(
                    channel="facebook", sender_id=str(sender), text=text, received_at=received
                )
            )
    return messages


class CaptureSink:
    """Test double for the send API; records sends, optionally failing
    the first few attempts to exercise the retry path."""

    def __init__(self, fail_first: int = 0):
        self.fail_first = fail_first
        self.attempts: list[tuple[str, str]] = []
        self.sent: list[tuple[str, str]] = []

    def send(self, sender_id: str, text: str) -> None:
        self.attempts.append((sender_id, text))
        if self.fail_first > 0:
            self.fail_first -= 1
            raise SendError("simulated send failure")
        self.sent.append((sender_id, text))


class MessengerSendClient:  # pragma: no cover - needs network
    """Live Messenger send API adapter."""

    def __init__(self, page_access_token: str, api_base: str = GRAPH_API_BASE):
        self._token = page_access_token
        self._base = api_base

    def send(self, sender_id: str, text: str) -> None:
        response = requests.post(
            f"{self._base}/me/messages",
            params={"access_token": self._token},
            json={"recipient": {"id": sender_id}, "message": {"text": text}},
            timeout=10,
        )
        if response.status_code >= 400:
            raise SendError(f"send api returned status {response.status_code}")


def send_reply(client, sender_id: str, texts: list[str]) -> int:
    """Deliver each text in order, retrying a failed send once. Returns
    the number delivered; permanent failures are logged and skipped."""
    delivered = 0
    for text in texts:
        for attempt in (1, 2):
            try:
                client.send(sender_id, text)
                delivered += 1
                break
            except Exception as exc:
                if attempt == 1:
                    log.warning("send to %s failed (%s), retrying", sender_id, exc)
                else:
                    log.error("send to %s failed twice (%s), giving up", sender_id, exc)
    return delivered


class SenderLanes:
    """One lock per sender id; messages for a sender run serially."""

    def __init__(self):
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def lock_for(self, sender_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(sender_id, threading.Lock())


def create_app(
    engine: Engine,
    credentials: Credentials | None = None,
    send_client=None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    """Build the FastAPI application around a trained engine.

    ``send_client`` handles outbound Messenger deliveries; tests pass a
    :class:`CaptureSink`. When ``frontend_dir`` exists its static files
    are served at ``/``.
    """
    credentials = credentials or load_credentials()
    client = send_client if send_client is not None else MessengerSendClient(
        credentials.page_access_token
    )
    lanes = SenderLanes()

    for old in list(log.filters):
        if isinstance(old, _RedactSecrets):
            log.removeFilter(old)
    log.addFilter(_RedactSecrets([credentials.verify_token, credentials.page_access_token]))

    app = FastAPI(title="dialogforge", docs_url=None, redoc_url=None)
    app.state.engine = engine
    app.state.lanes = lanes
    app.state.send_client = client

    def _converse(sender_id: str, text: str) -> list[str]:
        with lanes.lock_for(sender_id):
            return handle_message(engine, sender_id, text)

    def _process_facebook(messages: list[InboundMessage]) -> None:
        for message in messages:
            with lanes.lock_for(message.sender_id):
                replies = handle_message(engine, message.sender_id, message.text)
                send_reply(client, message.sender_id, replies)

    @app.get("/webhooks/facebook/webhook")
    def verify(request: Request):
        params = request.query_params
        mode = params.get("hub.mode")
        token = params.get("hub.verify_token")
        challenge = params.get("hub.challenge")
        if mode is None or token is None or challenge is None:
            raise HTTPException(status_code=400, detail="missing hub parameters")
        if mode != "subscribe" or not credentials.verify_token or token != credentials.verify_token:
            raise HTTPException(status_code=403, detail="verification failed")
        return PlainTextResponse(challenge)

    @app.post("/webhooks/facebook/webhook")
    async def receive(request: Request, background: BackgroundTasks):
        try:
            payload = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise HTTPException(status_code=400, detail="body is not valid JSON")
        if not isinstance(payload, dict):
            raise HTTPException(status_code=400, detail="body must be a JSON object")
        messages = webhook_receive(payload)
        if messages:
            background.add_task(_process_facebook, messages)
        return PlainTextResponse("EVENT_RECEIVED")

    @app.post("/webhooks/rest/webhook")
    def rest_chat(body: dict):
        sender = body.get("sender")
        message = body.get("message")
        if not isinstance(sender, str) or not sender.strip():
            raise HTTPException(status_code=400, detail="sender is required")
        if not isinstance(message, str) or not message.strip():
            raise HTTPException(status_code=400, detail="message must be non-blank")
        replies = _converse(sender.strip(), message)
        return [{"recipient_id": sender.strip(), "text": text} for text in replies]

    @app.get("/conversations/{sender}/debug")
    def debug_state(sender: str):
        info = engine.debug_info.get(sender)
        if info is None:
            raise HTTPException(status_code=404, detail=f"no conversation for sender {sender!r}")
        tracker = engine.tracker_for(sender)
        return JSONResponse({**info, "sender": sender, "slots": dict(tracker.slots)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="webchat")

    return app
