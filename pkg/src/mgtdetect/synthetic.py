"""Synthetic labeled corpora for tests, demos, and smoke training.

Documents are built from per-class word pools, so the word string alone
determines the gold label. That makes a zero-noise mock scorer keyed on the
generated rule an exact oracle for the whole pipeline, and makes tiny
models able to memorize the task.
"""

from __future__ import annotations

import numpy as np

from .corpus import NUM_CLASSES, Dataset, Document, LabelId


def class_vocabulary(stems_per_class: int = 25) -> dict[str, LabelId]:
    """Deterministic word -> label rule; word lengths vary within each class."""
    rule: dict[str, LabelId] = {}
    for c in range(NUM_CLASSES):
        for j in range(stems_per_class):
            word = f"c{c}tok{j}" + "a" * (j % 5)
            rule[word] = c
    return rule


def synthetic_dataset(n_docs: int, seed: int, min_words: int = 20, max_words: int = 60,
                      split: str = "dev", stems_per_class: int = 25,
                      min_segment: int = 3, max_segment: int = 12) -> tuple[Dataset, dict[str, LabelId]]:
    """Generate documents of labeled segments; returns (dataset, word rule)."""
    rule = class_vocabulary(stems_per_class)
    by_class: list[list[str]] = [[] for _ in range(NUM_CLASSES)]
    for word, label in rule.items():
        by_class[label].append(word)

    rng = np.random.default_rng(seed)
    documents = []
    for i in range(n_docs):
        target = int(rng.integers(min_words, max_words + 1))
        words: list[str] = []
        labels: list[LabelId] = []
        while len(words) < target:
            label = int(rng.integers(0, NUM_CLASSES))
            run = int(rng.integers(min_segment, max_segment + 1))
            run = min(run, target - len(words))
            pool = by_class[label]
            picks = rng.integers(0, len(pool), size=run)
            words.extend(pool[p] for p in picks)
            labels.extend([label] * run)
        text = " ".join(words)
        documents.append(Document(id=f"syn-{split}-{i:04d}", text=text,
                                  words=tuple(words), labels=tuple(labels)))
    return Dataset(split=split, documents=tuple(documents)), rule
