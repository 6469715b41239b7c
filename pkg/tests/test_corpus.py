import io
import json

import numpy as np
import pytest

from mgtdetect import (
    Dataset,
    Document,
    LabelMap,
    SpanAnnotation,
    dataset_to_jsonl,
    document_to_json,
    labels_to_spans,
    parse_dataset,
    spans_to_labels,
    whitespace_tokenize,
    write_dataset,
)
from mgtdetect.errors import (
    CoverageGapError,
    EmptyInputError,
    LengthMismatchError,
    MalformedRecordError,
    OutOfRangeError,
    OverlapError,
    UnknownLabelError,
)


def test_whitespace_tokenize_basic():
    assert whitespace_tokenize("this was continued") == ["this", "was", "continued"]


def test_whitespace_tokenize_empty():
    assert whitespace_tokenize("") == []
    assert whitespace_tokenize("   \t\n") == []


def test_whitespace_tokenize_runs():
    assert whitespace_tokenize("a\t b\n") == ["a", "b"]
    # non-breaking space and other unicode whitespace also separate words
    assert whitespace_tokenize("a b c") == ["a", "b", "c"]


def test_document_length_mismatch():
    with pytest.raises(LengthMismatchError):
        Document(id="d", text="a b", words=("a", "b"), labels=(0,))


def test_document_from_text():
    doc = Document.from_text("d", "a  b\tc", labels=[0, 1, 2])
    assert doc.words == ("a", "b", "c")
    assert doc.labels == (0, 1, 2)
    assert len(doc) == 3


def test_dataset_rejects_duplicate_ids():
    a = Document.from_text("d1", "x")
    b = Document.from_text("d1", "y")
    with pytest.raises(MalformedRecordError):
        Dataset(split="test", documents=(a, b))


def test_label_map_must_cover_four_ids():
    with pytest.raises(UnknownLabelError):
        LabelMap(names={0: "a", 1: "b"})
    with pytest.raises(UnknownLabelError):
        LabelMap(names={0: "a", 1: "b", 2: "c", 5: "d"})


def test_label_map_from_json():
    m = LabelMap.from_json('{"0":"h","1":"syn","2":"gen","3":"sum"}')
    assert m.name(2) == "gen"


# -- spans --

def test_labels_to_spans_examples():
    assert labels_to_spans([1, 1, 1, 0, 0]) == [
        SpanAnnotation(0, 3, 1),
        SpanAnnotation(3, 5, 0),
    ]
    assert labels_to_spans([0]) == [SpanAnnotation(0, 1, 0)]
    assert labels_to_spans([0, 1, 0, 1]) == [
        SpanAnnotation(0, 1, 0),
        SpanAnnotation(1, 2, 1),
        SpanAnnotation(2, 3, 0),
        SpanAnnotation(3, 4, 1),
    ]


def test_labels_to_spans_empty():
    with pytest.raises(EmptyInputError):
        labels_to_spans([])


def test_spans_to_labels_examples():
    assert spans_to_labels([SpanAnnotation(0, 2, 3)], 2) == [3, 3]
    assert spans_to_labels([SpanAnnotation(0, 1, 0), SpanAnnotation(1, 3, 2)], 3) == [0, 2, 2]


def test_spans_to_labels_errors():
    with pytest.raises(CoverageGapError):
        spans_to_labels([SpanAnnotation(0, 1, 0)], 2)
    with pytest.raises(CoverageGapError):
        spans_to_labels([SpanAnnotation(1, 2, 0)], 2)
    with pytest.raises(OverlapError):
        spans_to_labels([SpanAnnotation(0, 2, 0), SpanAnnotation(1, 3, 1)], 3)
    with pytest.raises(OutOfRangeError):
        spans_to_labels([SpanAnnotation(0, 5, 0)], 3)
    with pytest.raises(CoverageGapError):
        spans_to_labels([], 3)


def test_span_round_trip_random():
    rng = np.random.default_rng(101)
    for _ in range(300):
        n = int(rng.integers(1, 80))
        labels = [int(v) for v in rng.integers(0, 4, size=n)]
        spans = labels_to_spans(labels)
        # runs are maximal: adjacent spans never share a label
        for left, right in zip(spans, spans[1:]):
            assert left.end == right.start
            assert left.label != right.label
        assert spans_to_labels(spans, n) == labels


# -- parsing --

def make_line(**kwargs):
    return json.dumps(kwargs) + "\n"


def test_parse_minimal_record():
    line = make_line(id="d1", text="a b", tokens=["a", "b"], labels=[0, 1])
    dataset = parse_dataset(io.StringIO(line), split="dev")
    assert len(dataset) == 1
    doc = dataset.documents[0]
    assert doc.words == ("a", "b")
    assert doc.labels == (0, 1)
    assert dataset.split == "dev"


def test_parse_without_tokens_or_labels():
    dataset = parse_dataset(io.StringIO(make_line(id="d1", text="a b c")))
    assert dataset.documents[0].words == ("a", "b", "c")
    assert dataset.documents[0].labels is None


def test_parse_length_mismatch():
    line = make_line(id="d1", text="a b c", tokens=["a", "b", "c"], labels=[0, 1])
    with pytest.raises(LengthMismatchError):
        parse_dataset(io.StringIO(line))


def test_parse_unknown_label():
    line = make_line(id="d1", text="a b", tokens=["a", "b"], labels=[0, 7])
    with pytest.raises(UnknownLabelError):
        parse_dataset(io.StringIO(line))


def test_parse_tokens_disagree_with_text():
    line = make_line(id="d1", text="a b", tokens=["a", "c"], labels=[0, 0])
    with pytest.raises(MalformedRecordError):
        parse_dataset(io.StringIO(line))


def test_parse_rejects_empty_document():
    with pytest.raises(MalformedRecordError):
        parse_dataset(io.StringIO(make_line(id="d1", text="   ")))


def test_parse_reports_line_numbers():
    good = make_line(id="d1", text="a", tokens=["a"], labels=[0])
    bad = make_line(id="d2", text="b", tokens=["b"], labels=[9])
    with pytest.raises(UnknownLabelError, match="line 2"):
        parse_dataset(io.StringIO(good + bad))


def test_parse_invalid_json():
    with pytest.raises(MalformedRecordError, match="line 1"):
        parse_dataset(io.StringIO("{not json\n"))


def test_parse_bool_labels_rejected():
    line = make_line(id="d1", text="a", tokens=["a"], labels=[True])
    with pytest.raises(MalformedRecordError):
        parse_dataset(io.StringIO(line))


def test_parse_csv_records():
    rows = "id,text,tokens,labels\n" + \
        'a1,alpha beta,"[""alpha"", ""beta""]","[0, 2]"\n'
    dataset = parse_dataset(io.StringIO(rows), format="csv")
    assert dataset.documents[0].words == ("alpha", "beta")
    assert dataset.documents[0].labels == (0, 2)


def test_serialize_field_order_and_compactness():
    doc = Document.from_text("d1", "a b", labels=[0, 1])
    assert document_to_json(doc) == '{"id":"d1","text":"a b","tokens":["a","b"],"labels":[0,1]}'


def test_serialize_round_trip_byte_stable():
    rng = np.random.default_rng(55)
    docs = []
    for i in range(20):
        n = int(rng.integers(1, 30))
        words = [f"w{int(v)}" for v in rng.integers(0, 50, size=n)]
        labels = [int(v) for v in rng.integers(0, 4, size=n)]
        docs.append(Document.from_text(f"d{i}", " ".join(words), labels=labels))
    dataset = Dataset(split="test", documents=tuple(docs))

    first = dataset_to_jsonl(dataset)
    reparsed = parse_dataset(io.StringIO(first))
    second = dataset_to_jsonl(reparsed)
    assert first == second


def test_write_dataset_stream():
    doc = Document.from_text("d1", "a", labels=[3])
    buffer = io.StringIO()
    write_dataset([doc], buffer)
    assert buffer.getvalue() == document_to_json(doc) + "\n"


def test_parse_unicode_text():
    line = make_line(id="u1", text="naïve Σ-protocol", tokens=["naïve", "Σ-protocol"], labels=[0, 2])
    dataset = parse_dataset(io.StringIO(line))
    assert dataset.documents[0].words == ("naïve", "Σ-protocol")
    # serialization keeps non-ascii characters readable
    assert "naïve" in document_to_json(dataset.documents[0])
