"""
Dialogue policies: memoization and the recurrent net
====================================================

Shows how stories become training windows, how the two policies vote,
and how the ensemble resolves their predictions.
"""

import numpy as np

from dialogforge import bundled_data_dir, load_bundle
from dialogforge.dialogue import (
    DialogueTracker,
    UserUttered,
    decision_states,
    ensemble_select,
    featurize_state,
    memo_predict,
    memo_train,
    rnn_predict,
    rnn_train,
    stack_window,
    state_dim,
    stories_to_training,
)

domain, stories, _ = load_bundle(bundled_data_dir())
dim = state_dim(domain)
print(f"state vector dimension: {dim}"
      f" = {len(domain.actions)} actions + {len(domain.intents)} intents"
      f" + {len(domain.entity_types)} entity flags + {len(domain.slots)} slot flags")

# each bot step in a story yields one (window, action) sample; a run of
# bot turns also emits an implicit action_listen sample at its end
samples = stories_to_training(stories, domain)
print(f"{len(stories)} stories -> {len(samples)} training samples")

labels = np.bincount([label for _, label in samples], minlength=len(domain.actions))
for action, count in sorted(zip(domain.actions, labels), key=lambda x: -x[1])[:5]:
    print(f"  {action:40s} {count}")

# train both policies
memo = memo_train(samples, domain.actions)
print(f"\nmemoization table: {len(memo.table)} distinct windows")
rnn = rnn_train(samples, domain.actions, seed=7)
print("recurrent policy trained")

# a state the stories cover: user just said a greeting
tracker = DialogueTracker("demo")
tracker.apply(UserUttered("halo", "greeting", (), 1.0))
window = stack_window(decision_states(tracker, domain), dim)
print("\nwindow shape:", window.shape, "(zero rows are padding)")

memo_vote = memo_predict(memo, window)
rnn_vote = rnn_predict(rnn, window)
print(f"memoization: {memo_vote.action} ({memo_vote.confidence:.2f}, priority {memo_vote.priority})")
print(f"recurrent:   {rnn_vote.action} ({rnn_vote.confidence:.2f}, priority {rnn_vote.priority})")

selection = ensemble_select([memo_vote, rnn_vote])
print(f"ensemble picks {selection.action} via {selection.policy}")

# a state the stories never visited: flip one feature bit and the memo
# misses, so the recurrent policy generalizes on its own
unseen = window.copy()
unseen[0, 0] = 1.0
memo_vote = memo_predict(memo, unseen)
rnn_vote = rnn_predict(rnn, unseen)
print(f"\nafter perturbing the window: memo hit = {memo_vote.action is not None},",
      f"rnn predicts {rnn_vote.action} ({rnn_vote.confidence:.2f})")
selection = ensemble_select([memo_vote, rnn_vote])
print(f"ensemble picks {selection.action} via {selection.policy}")

# fresh state featurization, for reference
print("\nfresh tracker state bits set:",
      int(featurize_state(DialogueTracker("x"), domain).sum()))
