"""
Intent classification with supervised embeddings
================================================

Trains the two-tower intent model on the bundled corpus, then ranks a
few messages. Both the message and every intent label live in the same
20-dimensional space; confidence comes from cosine similarity.
"""

import time

from dialogforge import bundled_data_dir, load_bundle, predict_intent, train_intent

domain, _, examples = load_bundle(bundled_data_dir())

print(f"training on {len(examples)} examples over {len(domain.intents)} intents ...")
start = time.perf_counter()
model = train_intent(examples, domain, seed=7)
print(f"done in {time.perf_counter() - start:.1f}s")

# vocabulary is built from the training texts, lowercased
print("vocabulary size:", model.vocab.size)

for text in [
    "jadwal kuliah dong",
    "assalamu alaikum",
    "nilai saya berapa ya",
    "cuaca di jogja gimana",
]:
    parse = predict_intent(model, text)
    print(f"\n{text!r} -> {parse.intent} ({parse.confidence:.3f})")
    # the full ranking always covers every intent and sums to 1
    for name, confidence in parse.ranking[:3]:
        print(f"  {name:28s} {confidence:.3f}")

# an empty message carries no evidence: the ranking collapses to the
# uniform distribution and the parse is flagged low confidence
parse = predict_intent(model, "")
print(f"\nempty message -> {parse.intent} ({parse.confidence:.3f}),",
      "low_confidence =", parse.low_confidence)
