"""Macro-averaged F1 over token labels, plus confusion statistics.

Tokens from all documents are pooled into one confusion matrix; per-class
precision, recall, and F1 come from the pooled counts, and the macro score
is their unweighted mean over the evaluated classes. All ratios are exact
rationals until the final float conversion, so results are reproducible to
the last bit and zero denominators are handled uniformly (score 0).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import NUM_CLASSES, Dataset, LabelId, LabelMap
from .errors import (
    EmptyInputError,
    ExtraPredictionError,
    LengthMismatchError,
    MissingPredictionError,
    UnknownLabelError,
    UnknownStrategyError,
)

CLASS_POLICIES = ("present", "all_four")


def confusion_counts(gold: Sequence[LabelId], pred: Sequence[LabelId]) -> np.ndarray:
    """4x4 matrix of token counts: rows gold, columns predicted."""
    if len(gold) != len(pred):
        raise LengthMismatchError(f"{len(gold)} gold labels vs {len(pred)} predictions")
    gold_arr = np.asarray(gold, dtype=np.intp)
    pred_arr = np.asarray(pred, dtype=np.intp)
    for name, arr in (("gold", gold_arr), ("pred", pred_arr)):
        if arr.size and (arr.min() < 0 or arr.max() >= NUM_CLASSES):
            raise UnknownLabelError(f"{name} labels outside 0..{NUM_CLASSES - 1}")
    matrix = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    np.add.at(matrix, (gold_arr, pred_arr), 1)
    return matrix


def _evaluated_classes(confusion: np.ndarray, class_policy: str) -> list[int]:
    if class_policy not in CLASS_POLICIES:
        raise UnknownStrategyError(
            f"unknown class policy {class_policy!r}; expected one of {CLASS_POLICIES}")
    if class_policy == "all_four":
        return list(range(NUM_CLASSES))
    present = set(np.flatnonzero(confusion.sum(axis=1)).tolist())
    present |= set(np.flatnonzero(confusion.sum(axis=0)).tolist())
    return sorted(present)


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    """Per-class metrics, pooled confusion counts, and the macro-F1 score.

    macro_f1 is an exact rational so that hand-checkable cases compare
    exactly; it converts to float only at serialization boundaries.
    """

    per_class: dict[LabelId, ClassMetrics]
    macro_f1: Fraction
    confusion: np.ndarray
    token_count: int
    classes_evaluated: tuple[LabelId, ...]

    @property
    def macro_f1_pct(self) -> float:
        return float(self.macro_f1 * 100)

    def to_dict(self) -> dict:
        return {
            "macro_f1": float(self.macro_f1),
            "macro_f1_pct": format_pct(self.macro_f1),
            "token_count": self.token_count,
            "classes_evaluated": list(self.classes_evaluated),
            "per_class": {
                str(label): {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for label, m in sorted(self.per_class.items())
            },
            "confusion": self.confusion.tolist(),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_table(self, label_map: LabelMap | None = None) -> str:
        """Aligned text table with per-class rows and the macro summary."""
        label_map = label_map or LabelMap()
        header = f"{'class':<20} {'precision':>9} {'recall':>9} {'f1':>9} {'support':>9}"
        lines = [header, "-" * len(header)]
        for label in self.classes_evaluated:
            m = self.per_class[label]
            name = f"{label} {label_map.name(label)}"
            lines.append(f"{name:<20} {m.precision * 100:>9.2f} {m.recall * 100:>9.2f} "
                         f"{m.f1 * 100:>9.2f} {m.support:>9d}")
        lines.append("-" * len(header))
        lines.append(f"{'macro F1':<20} {'':>9} {'':>9} {format_pct(self.macro_f1):>9} "
                     f"{self.token_count:>9d}")
        return "\n".join(lines)


def format_pct(fraction: float) -> str:
    """Render a fraction as a percentage with two decimals, e.g. '93.64'."""
    return f"{fraction * 100.0:.2f}"


def _report_from_confusion(confusion: np.ndarray, class_policy: str) -> EvalReport:
    classes = _evaluated_classes(confusion, class_policy)
    per_class: dict[LabelId, ClassMetrics] = {}
    f1_sum = Fraction(0)
    for c in classes:
        tp = int(confusion[c, c])
        fp = int(confusion[:, c].sum() - tp)
        fn = int(confusion[c, :].sum() - tp)
        precision = _ratio(tp, tp + fp)
        recall = _ratio(tp, tp + fn)
        f1 = _ratio(2 * tp, 2 * tp + fp + fn)  # equals 2PR/(P+R) with 0 fallback
        f1_sum += f1
        per_class[c] = ClassMetrics(precision=float(precision), recall=float(recall),
                                    f1=float(f1), support=tp + fn)
    macro = f1_sum / len(classes) if classes else Fraction(0)
    return EvalReport(per_class=per_class,
                      macro_f1=macro,
                      confusion=confusion,
                      token_count=int(confusion.sum()),
                      classes_evaluated=tuple(classes))


def macro_f1(gold: Sequence[LabelId], pred: Sequence[LabelId],
             class_policy: str = "present") -> Fraction:
    """Unweighted mean of per-class F1 over the evaluated class set.

    Returns an exact rational. Zero-denominator precision, recall, or F1
    contributes 0. `present` evaluates classes appearing in gold or pred;
    `all_four` always evaluates all four classes.
    """
    if len(gold) == 0:
        raise EmptyInputError("cannot score an empty label sequence")
    return _report_from_confusion(confusion_counts(gold, pred), class_policy).macro_f1


def evaluate_report(gold: Sequence[LabelId], pred: Sequence[LabelId],
                    class_policy: str = "present") -> EvalReport:
    """Full report for one pooled pair of label sequences."""
    if len(gold) == 0:
        raise EmptyInputError("cannot score an empty label sequence")
    return _report_from_confusion(confusion_counts(gold, pred), class_policy)


def evaluate_dataset(gold_dataset: Dataset | Iterable,
                     predictions: Mapping[str, Sequence[LabelId]],
                     class_policy: str = "present") -> EvalReport:
    """Pool tokens across all documents and score against predictions.

    Predictions must cover exactly the dataset's document ids, each with a
    label sequence matching the document's word count.
    """
    documents = list(gold_dataset)
    gold_ids = {doc.id for doc in documents}
    extra = sorted(set(predictions) - gold_ids)
    if extra:
        raise ExtraPredictionError(f"predictions for unknown document ids: {extra[:5]}")

    confusion = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    for doc in documents:
        if doc.id not in predictions:
            raise MissingPredictionError(f"no prediction for document {doc.id!r}")
        if doc.labels is None:
            raise MissingPredictionError(f"document {doc.id!r} has no gold labels")
        pred = predictions[doc.id]
        if len(pred) != len(doc.labels):
            raise LengthMismatchError(
                f"document {doc.id!r}: {len(doc.labels)} gold labels vs {len(pred)} predicted")
        confusion += confusion_counts(doc.labels, pred)
    if confusion.sum() == 0:
        raise EmptyInputError("no tokens to evaluate")
    return _report_from_confusion(confusion, class_policy)
