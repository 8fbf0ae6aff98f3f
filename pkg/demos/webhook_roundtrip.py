"""
Webhook roundtrip: the HTTP surface without a network
=====================================================

Builds the FastAPI gateway around a trained engine and exercises every
endpoint through an in-process test client: the verification handshake,
a Messenger-style event delivery, the plain REST channel, and the
per-conversation debug view.
"""

import json
import warnings
from datetime import date

# fastapi's testclient shim warns about its own httpx dependency
warnings.filterwarnings("ignore", message="Using `httpx` with `starlette.testclient`")
from fastapi.testclient import TestClient

from dialogforge import Credentials, build_engine, create_app, train_pipeline
from dialogforge.gateway import CaptureSink

models = train_pipeline(seed=7)
engine = build_engine(models, clock=lambda: date(2020, 9, 25))

# the capture sink stands in for the Messenger send API
sink = CaptureSink()
app = create_app(engine, Credentials(verify_token="opensesame"), sink)
client = TestClient(app)

print("health:", client.get("/health").json())

# platform verification: echo the challenge only for the right token
good = client.get("/webhooks/facebook/webhook", params={
    "hub.mode": "subscribe", "hub.verify_token": "opensesame", "hub.challenge": "42",
})
bad = client.get("/webhooks/facebook/webhook", params={
    "hub.mode": "subscribe", "hub.verify_token": "wrong", "hub.challenge": "42",
})
print(f"handshake: good token -> {good.status_code} {good.text!r},",
      f"bad token -> {bad.status_code}")

# an inbound Messenger event is acked immediately, replies go through
# the sink afterwards
event = {
    "object": "page",
    "entry": [{"messaging": [{
        "sender": {"id": "9001"},
        "timestamp": 1601000000000,
        "message": {"text": "jadwal sholat di yogyakarta dong"},
    }]}],
}
response = client.post("/webhooks/facebook/webhook", content=json.dumps(event))
print(f"\nmessenger event: ack {response.text!r}")
for recipient, text in sink.sent:
    print(f"  sent to {recipient}: {text.splitlines()[0]} ...")

# the REST channel answers in the response body instead
reply = client.post("/webhooks/rest/webhook",
                    json={"sender": "web-1", "message": "jadwal fd dong"}).json()
print("\nrest channel:")
for item in reply:
    for line in item["text"].splitlines():
        print(f"  {line}")

# the debug view exposes what the models saw on the latest turn
debug = client.get("/conversations/web-1/debug").json()
print("\ndebug for web-1:")
print("  intent:", debug["intent"])
print("  entities:", [(e["entity_type"], e["value"]) for e in debug["entities"]])
print("  policy:", debug["policy"]["name"])
print("  slots:", debug["slots"])
