"""
Corpus tour: examples, stories, domain
======================================

Walks through the bundled training data: how entity markup turns into
annotations, what a story looks like, and what the domain declares.
"""

from dialogforge import bundled_data_dir, load_bundle
from dialogforge.corpus import parse_entity_markup, render_entity_markup, validate

data_dir = bundled_data_dir()
print("bundle directory:", data_dir)

domain, stories, examples = load_bundle(data_dir)

# entity markup uses [surface](type) spans inside the sentence
text, annotations = parse_entity_markup("jadwal [fd](concentration) dong")
print("\nclean text:", text)
for a in annotations:
    print(f"  span {a.start}-{a.end} type={a.entity_type} surface={a.surface!r}")

# the round trip restores the original markup
print("round trip:", render_entity_markup(text, annotations))

# the parsed corpus: one intent per example, annotations already aligned
print("\nexamples:", len(examples))
by_intent = {}
for ex in examples:
    by_intent.setdefault(ex.intent, []).append(ex)
for intent in sorted(by_intent):
    print(f"  {intent}: {len(by_intent[intent])} examples")

sample = next(ex for ex in examples if ex.entities)
print("\none annotated example:", render_entity_markup(sample.text, sample.entities))

# stories are alternating user and bot turns
story = next(s for s in stories if s.name == "lecture_schedule_flow")
print(f"\nstory {story.name!r}:")
for step in story.steps:
    if hasattr(step, "intent"):
        entities = f" {step.entities}" if step.entities else ""
        print(f"  user: {step.intent}{entities}")
    else:
        print(f"  bot:  {step.action}")

# the domain ties it together: intents, entity types, slots, actions
print("\ndomain:")
print("  intents:", len(domain.intents))
print("  entity types:", domain.entity_types)
print("  slots:", tuple(s.name for s in domain.slots))
print("  actions:", len(domain.actions), "(first is", domain.actions[0] + ")")
print("  synonyms:", domain.synonyms)

# validate cross-checks every reference between the three files
report = validate(domain, stories, examples)
print("\nvalidation ok:", report.ok, "| errors:", len(report.errors),
      "| warnings:", len(report.warnings))
