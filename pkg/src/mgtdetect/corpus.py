"""Data model and ingestion for token-labeled scientific documents.

A document is a whitespace-tokenized text where every word carries one of
four class labels: human-written, synonym-replaced, machine-generated, or
summarized. The native storage format is JSON-lines, one record per line
with fields {id, text, tokens, labels} in that fixed order.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Sequence

from .errors import (
    CoverageGapError,
    EmptyInputError,
    LengthMismatchError,
    MalformedRecordError,
    OutOfRangeError,
    OverlapError,
    UnknownLabelError,
)

NUM_CLASSES = 4

LabelId = int

# 0 and 1 are fixed by the task definition; 2 and 3 are the repo default
# and can be overridden through LabelMap since the assignment is not pinned.
DEFAULT_LABEL_NAMES = {
    0: "human",
    1: "synonym-replaced",
    2: "machine-generated",
    3: "summarized",
}

SPLITS = ("train", "dev", "test")


@dataclass(frozen=True)
class LabelMap:
    """Mapping from the four class ids to human-readable names."""

    names: dict[LabelId, str] = field(default_factory=lambda: dict(DEFAULT_LABEL_NAMES))

    def __post_init__(self):
        if sorted(self.names) != list(range(NUM_CLASSES)):
            raise UnknownLabelError(
                f"label map must cover exactly ids 0..{NUM_CLASSES - 1}, got {sorted(self.names)}"
            )

    def name(self, label: LabelId) -> str:
        if label not in self.names:
            raise UnknownLabelError(f"label {label} outside map {sorted(self.names)}")
        return self.names[label]

    @classmethod
    def from_json(cls, text: str) -> "LabelMap":
        raw = json.loads(text)
        return cls(names={int(k): str(v) for k, v in raw.items()})


def whitespace_tokenize(text: str) -> list[str]:
    """Split on runs of Unicode whitespace; empty text gives an empty list."""
    return text.split()


@dataclass(frozen=True)
class Document:
    """One text with its whitespace words and optional per-word gold labels."""

    id: str
    text: str
    words: tuple[str, ...]
    labels: tuple[LabelId, ...] | None = None

    def __post_init__(self):
        if self.labels is not None and len(self.labels) != len(self.words):
            raise LengthMismatchError(
                f"document {self.id!r}: {len(self.words)} words vs {len(self.labels)} labels"
            )

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def from_text(cls, id: str, text: str, labels: Sequence[LabelId] | None = None) -> "Document":
        words = tuple(whitespace_tokenize(text))
        return cls(id=id, text=text, words=words,
                   labels=None if labels is None else tuple(labels))


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of documents belonging to one split."""

    split: str
    documents: tuple[Document, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for doc in self.documents:
            if doc.id in seen:
                raise MalformedRecordError(f"duplicate document id {doc.id!r} in split {self.split!r}")
            seen.add(doc.id)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def by_id(self) -> dict[str, Document]:
        return {doc.id: doc for doc in self.documents}


@dataclass(frozen=True, order=True)
class SpanAnnotation:
    """A maximal run of equally-labeled words: [start, end) with one label."""

    start: int
    end: int
    label: LabelId


def labels_to_spans(labels: Sequence[LabelId]) -> list[SpanAnnotation]:
    """Collapse a label sequence into maximal runs of equal labels."""
    if len(labels) == 0:
        raise EmptyInputError("cannot extract spans from an empty label sequence")
    spans: list[SpanAnnotation] = []
    start = 0
    for i in range(1, len(labels)):
        if labels[i] != labels[start]:
            spans.append(SpanAnnotation(start, i, labels[start]))
            start = i
    spans.append(SpanAnnotation(start, len(labels), labels[start]))
    return spans


def spans_to_labels(spans: Sequence[SpanAnnotation], n: int) -> list[LabelId]:
    """Expand spans back into a label sequence of length n.

    Spans must be sorted, non-overlapping, and cover [0, n) exactly.
    """
    if not spans:
        raise CoverageGapError(f"no spans given for {n} words")
    out: list[LabelId] = []
    cursor = 0
    for span in spans:
        if span.start < 0 or span.end > n or span.start >= span.end:
            raise OutOfRangeError(f"span [{span.start}:{span.end}) invalid for {n} words")
        if span.start < cursor:
            raise OverlapError(f"span [{span.start}:{span.end}) overlaps previous end {cursor}")
        if span.start > cursor:
            raise CoverageGapError(f"gap at [{cursor}:{span.start})")
        out.extend([span.label] * (span.end - span.start))
        cursor = span.end
    if cursor != n:
        raise CoverageGapError(f"gap at [{cursor}:{n})")
    return out


# -- parsing and serialization --

JSONL_FIELDS = ("id", "text", "tokens", "labels")

FORMATS = ("jsonl", "csv")


def _validate_record(record: dict, line_no: int, label_map: LabelMap) -> Document:
    for name in ("id", "text"):
        if name not in record:
            raise MalformedRecordError(f"line {line_no}: missing field {name!r}",
                                       line=line_no, field=name)
    doc_id = record["id"]
    text = record["text"]
    if not isinstance(doc_id, str) or not isinstance(text, str):
        raise MalformedRecordError(f"line {line_no}: id and text must be strings",
                                   line=line_no, field="id")

    derived = whitespace_tokenize(text)
    tokens = record.get("tokens", derived)
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise MalformedRecordError(f"line {line_no}: tokens must be a list of strings",
                                   line=line_no, field="tokens")
    if len(tokens) == 0:
        raise MalformedRecordError(f"line {line_no}: document {doc_id!r} has no words",
                                   line=line_no, field="tokens")
    # Non-empty whitespace-free tokens that join back to the normalized text
    # are exactly the whitespace tokenization of the text.
    if tokens != derived:
        raise MalformedRecordError(
            f"line {line_no}: tokens do not match whitespace tokenization of text",
            line=line_no, field="tokens")

    labels = record.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in labels):
            raise MalformedRecordError(f"line {line_no}: labels must be a list of integers",
                                       line=line_no, field="labels")
        if len(labels) != len(tokens):
            raise LengthMismatchError(
                f"line {line_no}: {len(tokens)} tokens vs {len(labels)} labels")
        for v in labels:
            if v not in label_map.names:
                raise UnknownLabelError(f"line {line_no}: label {v} outside map")
        labels = tuple(labels)

    return Document(id=doc_id, text=text, words=tuple(tokens), labels=labels)


def _iter_jsonl_records(stream: IO) -> Iterator[tuple[int, dict]]:
    for line_no, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecordError(f"line {line_no}: invalid JSON: {exc}", line=line_no) from exc
        if not isinstance(record, dict):
            raise MalformedRecordError(f"line {line_no}: record is not an object", line=line_no)
        yield line_no, record


def _iter_csv_records(stream: IO) -> Iterator[tuple[int, dict]]:
    # Tabular export: columns id,text,tokens,labels with tokens/labels as
    # JSON-encoded lists. Extra columns are ignored.
    if isinstance(stream, io.BufferedIOBase) or (hasattr(stream, "mode") and "b" in getattr(stream, "mode", "")):
        stream = io.TextIOWrapper(stream, encoding="utf-8")
    reader = csv.DictReader(stream)
    for line_no, row in enumerate(reader, start=2):
        record: dict = {k: row[k] for k in ("id", "text") if k in row and row[k] is not None}
        for name in ("tokens", "labels"):
            value = row.get(name)
            if value is None or value == "":
                continue
            try:
                record[name] = json.loads(value)
            except json.JSONDecodeError as exc:
                raise MalformedRecordError(
                    f"line {line_no}: column {name!r} is not valid JSON: {exc}",
                    line=line_no, field=name) from exc
        yield line_no, record


def parse_dataset(source: IO | str, format: str = "jsonl", split: str = "test",
                  label_map: LabelMap | None = None) -> Dataset:
    """Parse a dataset stream, validating every document.

    `source` may be an open text/binary stream or a string with the raw
    content. Documents keep their input order.
    """
    if format not in FORMATS:
        raise MalformedRecordError(f"unknown dataset format {format!r}; expected one of {FORMATS}")
    label_map = label_map or LabelMap()
    if isinstance(source, str):
        source = io.StringIO(source)
    records = _iter_jsonl_records(source) if format == "jsonl" else _iter_csv_records(source)
    documents = [_validate_record(record, line_no, label_map) for line_no, record in records]
    return Dataset(split=split, documents=tuple(documents))


def load_dataset(path, format: str = "jsonl", split: str = "test",
                 label_map: LabelMap | None = None) -> Dataset:
    """Parse a dataset file (UTF-8)."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_dataset(handle, format=format, split=split, label_map=label_map)


def document_to_json(doc: Document) -> str:
    """Serialize one document as a canonical JSON line (fixed field order)."""
    record: dict = {"id": doc.id, "text": doc.text, "tokens": list(doc.words)}
    if doc.labels is not None:
        record["labels"] = list(doc.labels)
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def write_dataset(dataset: Iterable[Document], stream: IO) -> None:
    """Write documents as JSON-lines in the canonical serialization."""
    for doc in dataset:
        stream.write(document_to_json(doc))
        stream.write("\n")


def dataset_to_jsonl(dataset: Iterable[Document]) -> str:
    buffer = io.StringIO()
    write_dataset(dataset, buffer)
    return buffer.getvalue()
