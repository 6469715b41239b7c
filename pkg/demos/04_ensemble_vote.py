"""
Dev-based selection and majority voting
=======================================

Independently noisy models disagree on different words, so a per-word
majority vote recovers labels that any single model gets wrong. Members
are picked by development-split score, then voted on the test split.
"""

from mgtdetect import (
    evaluate_dataset,
    format_pct,
    majority_vote,
    mock_scorer,
    predict_document,
    select_top_k,
    synthetic_dataset,
)

dev, rule = synthetic_dataset(60, seed=801, split="dev")
test, _ = synthetic_dataset(120, seed=802, split="test")

# five candidate models with different noise levels
candidates = {f"setup-{chr(100 + i)}": mock_scorer(rule, noise_rate=0.1 + 0.04 * i, seed=i)
              for i in range(5)}

dev_scores = {}
for name, scorer in candidates.items():
    predictions = {d.id: predict_document(scorer, d, 512).labels for d in dev}
    dev_scores[name] = float(evaluate_dataset(dev, predictions).macro_f1)
for name, score in sorted(dev_scores.items()):
    print(f"  {name}: dev {format_pct(score)}")

members = select_top_k(dev_scores, 3)
print("selected members:", members)

voted = {}
per_member = {name: {} for name in members}
for doc in test:
    preds = [predict_document(candidates[name], doc, 512) for name in members]
    for name, p in zip(members, preds):
        per_member[name][doc.id] = p.labels
    voted[doc.id] = tuple(majority_vote([p.labels for p in preds],
                                        [p.dists for p in preds]))

for name in members:
    print(f"  {name}: test {format_pct(evaluate_dataset(test, per_member[name]).macro_f1)}")
print("3-way ensemble:", format_pct(evaluate_dataset(test, voted).macro_f1))
