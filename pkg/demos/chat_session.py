"""
Chat session: training the full stack and talking to it
=======================================================

Trains every model from the bundled corpus, builds an engine with a
frozen clock, and replays a multi-turn schedule conversation while
peeking at the debug info behind each reply.
"""

import time
from datetime import date

from dialogforge import build_engine, handle_message, train_pipeline

started = time.perf_counter()
models = train_pipeline(seed=7)
print(f"trained all four models in {time.perf_counter() - started:.1f}s")

# a fixed clock keeps date-dependent replies reproducible
engine = build_engine(models, clock=lambda: date(2020, 9, 25))

script = [
    "halo",
    "jadwal kuliah dong",
    "fd",
    "makasih ya",
    "dadah bot",
]

for text in script:
    replies = handle_message(engine, "alya", text)
    debug = engine.debug_info["alya"]
    print(f"\nuser> {text}")
    for reply in replies:
        print(f"bot>  {reply}")
    intent = debug["intent"]
    print(f"      intent {intent['name']} ({intent['confidence']:.3f}),",
          f"policy {debug['policy']}, actions {debug['actions']}")
    for ent in debug["entities"]:
        print(f"      entity {ent['entity_type']}={ent['value']!r}"
              f" from {ent['surface']!r} (p={ent['confidence']:.2f})")

# the tracker remembers slots across turns
tracker = engine.tracker_for("alya")
print("\nslots after the conversation:", tracker.slots)

# a second sender gets an independent tracker; their slot fills do not
# bleed into alya's session
replies = handle_message(engine, "bima", "jadwal ds dong")
print("\nuser(bima)> jadwal ds dong")
for reply in replies:
    print(f"bot>  {reply}")
print("bima slots:", engine.tracker_for("bima").slots)
print("alya slots unchanged:", engine.tracker_for("alya").slots)
