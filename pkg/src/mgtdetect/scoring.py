"""Per-subtoken classifier backends and the single-model document pipeline.

A Scorer turns one chunk of subtokens into a matrix of class probabilities,
one row per content subtoken. predict_document composes the full lane:
whitespace words, alignment, chunking, per-chunk scoring, and word-level
aggregation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence, runtime_checkable

import numpy as np

from .alignment import (
    DISTRIBUTION_ATOL,
    Chunk,
    Subtokenizer,
    align,
    aggregate_to_words,
    chunk_alignment,
    effective_alignment,
)
from .corpus import NUM_CLASSES, Document, LabelId
from .errors import (
    EmptyDocumentError,
    InvalidNoiseRateError,
    LengthMismatchError,
    MalformedDistributionError,
    MetadataMismatchError,
    ValidationError,
)

INPUT_LENGTH_GRID = (256, 512, 1024, 2048)


@dataclass(frozen=True)
class ModelPreset:
    """One encoder size of the model family used for the taggers."""

    name: str
    params_millions: int
    hidden_size: int
    layers: int


PRESETS: dict[str, ModelPreset] = {
    "Xsmall": ModelPreset("Xsmall", 22, 384, 12),
    "Small": ModelPreset("Small", 44, 768, 6),
    "Base": ModelPreset("Base", 86, 768, 12),
    "Large": ModelPreset("Large", 304, 1024, 24),
}


@dataclass(frozen=True)
class ChunkScores:
    """Class-probability rows for the content subtokens of one chunk."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != NUM_CLASSES:
            raise MalformedDistributionError(
                f"expected rows of shape (n, {NUM_CLASSES}), got {rows.shape}")
        if np.any(rows < 0):
            raise MalformedDistributionError("negative probability in score row")
        sums = rows.sum(axis=1)
        if rows.shape[0] and np.any(np.abs(sums - 1.0) > DISTRIBUTION_ATOL):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise MalformedDistributionError(f"row {bad} sums to {sums[bad]!r}, expected 1")
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)


@runtime_checkable
class Scorer(Protocol):
    """A per-subtoken classifier over 4 classes.

    max_input_length is the model's total sequence budget including special
    positions; None means unlimited (synthetic backends).
    """

    id: str
    num_classes: int
    subtokenizer: Subtokenizer
    max_input_length: int | None

    def score_chunk(self, chunk: Chunk) -> ChunkScores:
        ...


class MockSubtokenizer:
    """Deterministic synthetic subtokenizer for mock scorers.

    Each distinct word gets a fresh block of ids on first sight; the number
    of subtokens per word varies with word length so chunking is exercised
    with realistic multi-subtoken words.
    """

    MAX_PIECES = 4

    def __init__(self, special_token_overhead: int = 2):
        self.special_token_overhead = special_token_overhead
        self._word_keys: dict[str, int] = {}

    @property
    def vocab_size(self) -> int:
        return max(1, len(self._word_keys) * self.MAX_PIECES)

    def encode(self, word: str) -> list[int]:
        key = self._word_keys.setdefault(word, len(self._word_keys))
        n_pieces = 1 + (len(word) % self.MAX_PIECES)
        return [key * self.MAX_PIECES + j for j in range(n_pieces)]


def _unit_draw(seed: int, tag: str, word_pos: int, word: str) -> float:
    """Stable uniform draw in [0, 1) keyed by position and word string.

    Keying on the word occurrence (not the subtoken or the chunk) keeps all
    subtokens of a word in agreement and makes scores independent of how the
    document was chunked.
    """
    payload = f"{tag}\x00{word_pos}\x00{word}".encode("utf-8")
    digest = hashlib.blake2b(payload, key=seed.to_bytes(8, "little", signed=True),
                             digest_size=8).digest()
    return int.from_bytes(digest, "little") / 2.0 ** 64


@dataclass
class MockScorer:
    """Rule-driven scorer used as a test oracle.

    Emits the one-hot of rule[word] (0 for unknown words); with probability
    noise_rate per word occurrence, substitutes a uniformly chosen wrong
    label instead. Fully deterministic given the seed.
    """

    rule: Mapping[str, LabelId]
    noise_rate: float = 0.0
    seed: int = 0
    id: str = ""
    num_classes: int = NUM_CLASSES
    max_input_length: int | None = None
    subtokenizer: Subtokenizer = field(default_factory=MockSubtokenizer)

    def __post_init__(self):
        if not (0.0 <= self.noise_rate < 1.0):
            raise InvalidNoiseRateError(f"noise_rate must be in [0, 1), got {self.noise_rate}")
        if not self.id:
            self.id = f"mock-{self.seed}"

    def label_for(self, word_pos: int, word: str) -> LabelId:
        label = self.rule.get(word, 0)
        if self.noise_rate > 0.0 and _unit_draw(self.seed, "flip", word_pos, word) < self.noise_rate:
            wrong = [c for c in range(self.num_classes) if c != label]
            pick = int(_unit_draw(self.seed, "pick", word_pos, word) * len(wrong))
            label = wrong[min(pick, len(wrong) - 1)]
        return label

    def score_chunk(self, chunk: Chunk) -> ChunkScores:
        if chunk.words is None:
            raise ValidationError("mock scorer needs chunks that carry word strings")
        first = chunk.word_span[0]
        rows = np.zeros((len(chunk.subtoken_ids), NUM_CLASSES), dtype=np.float64)
        for j, word_pos in enumerate(chunk.word_index):
            word = chunk.words[word_pos - first]
            rows[j, self.label_for(word_pos, word)] = 1.0
        return ChunkScores(rows)


def mock_scorer(rule: Mapping[str, LabelId], noise_rate: float = 0.0,
                seed: int = 0, id: str = "") -> MockScorer:
    """Build a rule-driven mock scorer (see MockScorer)."""
    return MockScorer(rule=rule, noise_rate=noise_rate, seed=seed, id=id)


@dataclass(frozen=True)
class DocumentPrediction:
    """Per-word class distributions and their argmax labels for one document."""

    doc_id: str
    dists: np.ndarray
    labels: tuple[LabelId, ...]


def predict_document(s: Scorer, d: Document, max_subtokens: int,
                     strategy: str = "mean") -> DocumentPrediction:
    """Run one scorer over one document and read out word-level labels.

    Pipeline: align words to subtokens, chunk under the subtoken budget,
    score each chunk, concatenate rows in word order, aggregate to words.
    Argmax ties break toward the lowest label id.
    """
    if len(d.words) == 0:
        raise EmptyDocumentError(f"document {d.id!r} has no words")
    if s.max_input_length is not None and max_subtokens > s.max_input_length:
        raise MetadataMismatchError(
            f"scorer {s.id!r} accepts at most {s.max_input_length} subtokens, got {max_subtokens}")

    tok = s.subtokenizer
    a = align(d.words, tok)
    chunks = chunk_alignment(a, max_subtokens, tok.special_token_overhead)
    row_blocks = []
    for chunk in chunks:
        scores = s.score_chunk(chunk)
        if len(scores) != len(chunk):
            raise LengthMismatchError(
                f"scorer {s.id!r} returned {len(scores)} rows for a chunk of {len(chunk)} subtokens")
        row_blocks.append(scores.rows)
    rows = np.concatenate(row_blocks, axis=0)

    eff = effective_alignment(chunks, a.word_count, a.words)
    dists = aggregate_to_words(rows, eff, strategy)
    labels = tuple(int(x) for x in np.argmax(dists, axis=1))
    return DocumentPrediction(doc_id=d.id, dists=dists, labels=labels)
