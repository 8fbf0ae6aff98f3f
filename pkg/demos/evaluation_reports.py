"""
Evaluation reports: intent, entity, and policy quality
======================================================

Trains on the bundled corpus and scores each model against its own
training data, the honest-upper-bound check a release should pass.
"""

import numpy as np

from dialogforge import (
    Engine,
    UtteranceExample,
    bundled_data_dir,
    evaluate_entities,
    evaluate_nlu,
    evaluate_policy,
    load_bundle,
    train_pipeline,
)

data_dir = bundled_data_dir()
domain, stories, examples = load_bundle(data_dir)
models = train_pipeline(seed=7)

# intent classification: confusion counts roll up into per-class
# precision/recall/f1 plus a macro average
report = evaluate_nlu(models.intent_model, examples)
print("intent report")
print(report.format_table())
support = sum(m.support for m in report.classes.values())
print(f"macro f1 {report.macro_f1:.3f} over {support} examples")

# entity extraction scores exact (start, end, type) span matches
report = evaluate_entities(models.crf_model, examples)
print("\nentity report")
print(report.format_table())

# any misclassification lands in confused_with; demonstrate by scoring
# a corrupted copy where one greeting is relabeled as thanks
corrupted = [
    ex if ex.text != "halo"
    else UtteranceExample(text=ex.text, intent="thanks", entities=ex.entities)
    for ex in examples
]
report = evaluate_nlu(models.intent_model, corrupted)
print("\nafter mislabeling one greeting as thanks:")
print(f"  thanks recall {report.classes['thanks'].recall:.3f},"
      f" confused_with = {report.confused_with['thanks']}")

# policy evaluation replays every story through the ensemble and counts
# predicted vs recorded actions
policy_engine = Engine(
    domain=domain,
    intent_model=None,
    crf_model=None,
    memo=models.memo,
    rnn=models.rnn,
)
matrix = evaluate_policy(policy_engine, stories)
diagonal = int(np.trace(matrix.counts))
total = int(matrix.counts.sum())
print(f"\npolicy replay: {diagonal}/{total} decisions reproduced")
for label, row_sum in zip(matrix.labels, matrix.counts.sum(axis=1)):
    if row_sum:
        print(f"  {label:40s} {int(row_sum)}")
