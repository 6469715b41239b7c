"""Prediction interchange files and human-readable span reports."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .corpus import Document, LabelId, LabelMap, labels_to_spans
from .errors import LengthMismatchError, MalformedRecordError


@dataclass(frozen=True)
class PredictionRecord:
    """One document's predicted labels, with optional per-word distributions."""

    doc_id: str
    labels: tuple[LabelId, ...]
    dists: tuple[tuple[float, ...], ...] | None = None
    tallies: tuple[tuple[int, ...], ...] | None = None


def write_predictions(records: Iterable[PredictionRecord], stream: IO) -> None:
    """Write prediction records as JSON-lines with a fixed field order."""
    for record in records:
        payload: dict = {"doc_id": record.doc_id, "labels": list(record.labels)}
        if record.dists is not None:
            payload["dists"] = [list(row) for row in record.dists]
        if record.tallies is not None:
            payload["tallies"] = [list(row) for row in record.tallies]
        stream.write(json.dumps(payload, ensure_ascii=False, separators=(",", ":")))
        stream.write("\n")


def read_predictions(stream: IO) -> list[PredictionRecord]:
    records = []
    for line_no, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecordError(f"line {line_no}: invalid JSON: {exc}",
                                       line=line_no) from exc
        if "doc_id" not in raw or "labels" not in raw:
            raise MalformedRecordError(f"line {line_no}: prediction needs doc_id and labels",
                                       line=line_no)
        dists = raw.get("dists")
        if dists is not None:
            if len(dists) != len(raw["labels"]):
                raise LengthMismatchError(
                    f"line {line_no}: {len(dists)} distribution rows vs {len(raw['labels'])} labels")
            dists = tuple(tuple(float(x) for x in row) for row in dists)
        tallies = raw.get("tallies")
        if tallies is not None:
            tallies = tuple(tuple(int(x) for x in row) for row in tallies)
        records.append(PredictionRecord(doc_id=str(raw["doc_id"]),
                                        labels=tuple(int(v) for v in raw["labels"]),
                                        dists=dists,
                                        tallies=tallies))
    return records


def predictions_as_map(records: Sequence[PredictionRecord]) -> dict[str, tuple[LabelId, ...]]:
    return {r.doc_id: r.labels for r in records}


def dists_array(record: PredictionRecord) -> np.ndarray:
    if record.dists is None:
        raise LengthMismatchError(f"prediction for {record.doc_id!r} carries no distributions")
    return np.asarray(record.dists, dtype=np.float64)


def disagreement_spans(pred: Sequence[LabelId], gold: Sequence[LabelId]):
    """Maximal runs where pred differs from gold with a constant label pair."""
    if len(pred) != len(gold):
        raise LengthMismatchError(f"{len(pred)} predicted vs {len(gold)} gold labels")
    runs = []
    start = None
    for i in range(len(pred)):
        if pred[i] != gold[i]:
            if start is None or (pred[i], gold[i]) != (pred[start], gold[start]):
                if start is not None:
                    runs.append((start, i, pred[start], gold[start]))
                start = i
        elif start is not None:
            runs.append((start, i, pred[start], gold[start]))
            start = None
    if start is not None:
        runs.append((start, len(pred), pred[start], gold[start]))
    return runs


def render_span_report(record: PredictionRecord, gold: Document | None = None,
                       label_map: LabelMap | None = None) -> str:
    """Spans of one document's predicted labels, plus disagreements vs gold."""
    label_map = label_map or LabelMap()
    lines = [f"doc {record.doc_id} ({len(record.labels)} words)"]
    for span in labels_to_spans(record.labels):
        lines.append(f"  [{span.start}:{span.end}) {label_map.name(span.label)}")
    if gold is not None and gold.labels is not None:
        runs = disagreement_spans(record.labels, gold.labels)
        lines.append(f"  disagreements vs gold: {len(runs)}")
        for start, end, pred_label, gold_label in runs:
            lines.append(f"    [{start}:{end}) pred={label_map.name(pred_label)} "
                         f"gold={label_map.name(gold_label)}")
    return "\n".join(lines) + "\n"
