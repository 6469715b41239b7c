import numpy as np

from mgtdetect import class_vocabulary, mock_scorer, predict_document, synthetic_dataset


def test_vocabulary_covers_all_classes():
    rule = class_vocabulary()
    assert set(rule.values()) == {0, 1, 2, 3}


def test_dataset_shape_and_labels():
    dataset, rule = synthetic_dataset(25, seed=4, min_words=10, max_words=40)
    assert len(dataset) == 25
    for doc in dataset:
        assert 10 <= len(doc.words) <= 40
        assert doc.labels is not None
        # the generating rule is the gold labeling
        assert tuple(rule[w] for w in doc.words) == doc.labels


def test_dataset_seed_determinism():
    a, _ = synthetic_dataset(10, seed=9)
    b, _ = synthetic_dataset(10, seed=9)
    assert [d.text for d in a] == [d.text for d in b]
    c, _ = synthetic_dataset(10, seed=10)
    assert [d.text for d in a] != [d.text for d in c]


def test_dataset_has_multiword_segments():
    dataset, _ = synthetic_dataset(5, seed=2, min_words=30, max_words=60)
    runs = []
    for doc in dataset:
        run = 1
        for left, right in zip(doc.labels, doc.labels[1:]):
            run = run + 1 if left == right else 1
            runs.append(run)
    assert max(runs) >= 3  # label runs, as in segment-annotated text


def test_dataset_is_memorizable():
    dataset, rule = synthetic_dataset(8, seed=6)
    scorer = mock_scorer(rule)
    for doc in dataset:
        assert predict_document(scorer, doc, 512).labels == doc.labels


def test_all_classes_present_overall():
    dataset, _ = synthetic_dataset(30, seed=1)
    seen = set()
    for doc in dataset:
        seen.update(doc.labels)
    assert seen == {0, 1, 2, 3}
