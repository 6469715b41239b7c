"""
Documents, labels, and span views
=================================

A document is its whitespace words plus one class label per word:
0 human, 1 synonym-replaced, 2 machine-generated, 3 summarized.
"""

import io

from mgtdetect import (
    Document,
    labels_to_spans,
    parse_dataset,
    spans_to_labels,
    whitespace_tokenize,
)

# whitespace runs are the only word boundary
print(whitespace_tokenize("this was continued"))
print(whitespace_tokenize("tabs\tand\nnewlines   too"))

# the native storage format is JSON-lines
line = '{"id":"d1","text":"model written words here","tokens":["model","written","words","here"],"labels":[2,2,0,0]}\n'
dataset = parse_dataset(io.StringIO(line), split="dev")
doc = dataset.documents[0]
print(doc.id, doc.words, doc.labels)

# label sequences collapse into maximal same-label spans and back
spans = labels_to_spans(doc.labels)
for span in spans:
    print(f"  words [{span.start}:{span.end}) carry label {span.label}")
assert spans_to_labels(spans, len(doc)) == list(doc.labels)

# building documents directly
doc2 = Document.from_text("d2", "one two three", labels=[0, 1, 0])
print(doc2.words, "->", labels_to_spans(doc2.labels))
