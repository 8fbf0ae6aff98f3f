"""
Entity extraction with a linear-chain CRF
=========================================

Trains the tagger on the bundled corpus and decodes a few sentences.
Tags follow the BIO scheme: B- opens a span, I- continues it, O is
outside. Synonyms map surfaces like "fd" to canonical values.
"""

from dialogforge import bundled_data_dir, extract_entities, load_bundle, train_crf
from dialogforge.entity import marginals, viterbi_decode
from dialogforge.textproc import crf_token_features, tokenize

domain, _, examples = load_bundle(bundled_data_dir())

print(f"training on {len(examples)} examples ...")
model = train_crf(examples, domain)
print("tag set:", model.tag_set.tags)
print("features:", len(model.feature_ids))

for text in [
    "jadwal fd dong",
    "minta jadwal sains data dong",
    "nilai untuk nim 18917102 dong",
    "cuaca di jogja gimana",
]:
    spans = extract_entities(model, text, domain.synonyms)
    print(f"\n{text!r}")
    for s in spans:
        print(f"  {s.entity_type}: {s.surface!r} -> {s.value!r}"
              f" (chars {s.start}-{s.end}, confidence {s.confidence:.3f})")

# under the hood: tokens get a feature window, viterbi picks the best
# tag path, per-position marginals give the confidence
text = "jadwal fd dong"
tokens = tokenize(text)
features = [crf_token_features(tokens, i) for i in range(len(tokens))]
path, score = viterbi_decode(model, features)
probs = marginals(model, features)
print(f"\n{text!r} decoded (path score {score:.2f}):")
for token, tag, row in zip(tokens, path, probs):
    best = row.max()
    print(f"  {token.surface:8s} {tag:16s} p={best:.3f}")
