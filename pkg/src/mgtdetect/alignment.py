"""Word/subtoken alignment, subtoken-budget chunking, and label projection.

Long documents must be split into model-sized pieces. The budget is counted
in subtokens, not words: a word-counted budget silently truncates inputs
once words start expanding into several subtokens. Chunks never split a
word across a boundary, except when a single word alone exceeds the whole
capacity, in which case it is cut and flagged.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .corpus import NUM_CLASSES, LabelId
from .errors import (
    EmptyDocumentError,
    InvalidBudgetError,
    LengthMismatchError,
    MalformedDistributionError,
    UnknownStrategyError,
)

DISTRIBUTION_ATOL = 1e-6

AGGREGATION_STRATEGIES = ("mean", "first")


@runtime_checkable
class Subtokenizer(Protocol):
    """Deterministic word-to-subtoken encoder of a pretrained model."""

    vocab_size: int
    special_token_overhead: int

    def encode(self, word: str) -> list[int]:
        """Encode one word; never empty for a non-empty word."""
        ...


class CharPieceSubtokenizer:
    """Splits words into fixed-size character pieces with hashed ids.

    Dependency-free stand-in for a real subword vocabulary: deterministic,
    multi-subtoken for long words, stable across processes (crc32, not
    Python's salted hash).
    """

    def __init__(self, piece_len: int = 4, vocab_size: int = 50000,
                 special_token_overhead: int = 2):
        if piece_len < 1:
            raise InvalidBudgetError("piece_len must be >= 1")
        self.piece_len = piece_len
        self.vocab_size = vocab_size
        self.special_token_overhead = special_token_overhead

    def encode(self, word: str) -> list[int]:
        pieces = [word[i:i + self.piece_len] for i in range(0, len(word), self.piece_len)]
        return [zlib.crc32(p.encode("utf-8")) % self.vocab_size for p in pieces] or [0]


class VocabSubtokenizer:
    """Greedy longest-prefix-match subword encoder over an explicit vocab.

    At each position the longest vocabulary piece that prefixes the rest of
    the word is consumed; if none matches, one character is consumed as UNK.
    This is the tokenizer serialized inside model artifacts, so encode must
    stay bit-for-bit reproducible from the vocab list alone.
    """

    def __init__(self, vocab: Sequence[str], unk_id: int, bos_id: int, eos_id: int):
        self.vocab = list(vocab)
        self.vocab_size = len(self.vocab)
        self.unk_id = unk_id
        self.bos_id = bos_id
        self.eos_id = eos_id
        self.special_token_overhead = 2
        # special-token strings are never matched inside words
        special = {unk_id, bos_id, eos_id}
        self._piece_to_id = {piece: i for i, piece in enumerate(self.vocab) if i not in special}
        self._max_piece_len = max((len(p) for p in self._piece_to_id), default=1)

    def encode(self, word: str) -> list[int]:
        ids: list[int] = []
        pos = 0
        while pos < len(word):
            for end in range(min(len(word), pos + self._max_piece_len), pos, -1):
                piece_id = self._piece_to_id.get(word[pos:end])
                if piece_id is not None:
                    ids.append(piece_id)
                    pos = end
                    break
            else:
                ids.append(self.unk_id)
                pos += 1
        return ids or [self.unk_id]


@dataclass(frozen=True)
class SubtokenAlignment:
    """Subtoken sequence of a document plus per-subtoken word provenance.

    word_index[i] is the word that produced subtoken i; it is non-decreasing
    and covers every word index in [0, word_count). `words` keeps the source
    strings around for scorers that need them (optional, not an invariant).
    """

    subtoken_ids: tuple[int, ...]
    word_index: tuple[int, ...]
    word_count: int
    words: tuple[str, ...] | None = None

    def __post_init__(self):
        if len(self.subtoken_ids) != len(self.word_index):
            raise LengthMismatchError(
                f"{len(self.subtoken_ids)} subtokens vs {len(self.word_index)} word indices")

    def __len__(self) -> int:
        return len(self.subtoken_ids)


@dataclass(frozen=True)
class Chunk:
    """A budget-respecting slice of an alignment covering whole words.

    word_span is (first, last) inclusive. word_index carries the absolute
    source word of each subtoken in the chunk. truncated_word is set only
    when a single word exceeded the capacity on its own and was cut.
    """

    subtoken_ids: tuple[int, ...]
    word_index: tuple[int, ...]
    word_span: tuple[int, int]
    words: tuple[str, ...] | None = None
    truncated_word: int | None = None

    def __len__(self) -> int:
        return len(self.subtoken_ids)


def align(words: Sequence[str], tok: Subtokenizer) -> SubtokenAlignment:
    """Concatenate per-word encodings, recording word provenance."""
    if len(words) == 0:
        raise EmptyDocumentError("cannot align an empty word sequence")
    subtoken_ids: list[int] = []
    word_index: list[int] = []
    for i, word in enumerate(words):
        ids = tok.encode(word)
        if not ids:
            raise EmptyDocumentError(f"subtokenizer returned no subtokens for word {i} ({word!r})")
        subtoken_ids.extend(ids)
        word_index.extend([i] * len(ids))
    return SubtokenAlignment(subtoken_ids=tuple(subtoken_ids),
                             word_index=tuple(word_index),
                             word_count=len(words),
                             words=tuple(words))


def chunk_alignment(a: SubtokenAlignment, max_subtokens: int, overhead: int) -> list[Chunk]:
    """Greedy left-to-right chunking under a subtoken budget.

    Capacity is max_subtokens - overhead (overhead reserves room for the
    model's per-chunk special positions). A word's subtokens always land in
    one chunk; a word that alone exceeds the capacity is truncated to
    capacity and flagged via truncated_word. Chunks partition the word range
    in order.
    """
    capacity = max_subtokens - overhead
    if capacity < 1:
        raise InvalidBudgetError(
            f"capacity {capacity} (max_subtokens {max_subtokens} - overhead {overhead}) must be >= 1")

    # Per-word subtoken slices, in word order.
    starts = [0] * a.word_count
    counts = [0] * a.word_count
    prev = -1
    for pos, w in enumerate(a.word_index):
        if w != prev:
            starts[w] = pos
            prev = w
        counts[w] += 1

    chunks: list[Chunk] = []
    word = 0
    while word < a.word_count:
        first = word
        used = 0
        truncated: int | None = None
        take_end = starts[word]
        while word < a.word_count:
            n = counts[word]
            if used == 0 and n > capacity:
                truncated = word
                take_end = starts[word] + capacity
                used = capacity
                word += 1
                break
            if used + n > capacity:
                break
            used += n
            take_end = starts[word] + n
            word += 1
        last = word - 1
        lo, hi = starts[first], take_end
        chunk_words = None if a.words is None else a.words[first:last + 1]
        chunks.append(Chunk(subtoken_ids=a.subtoken_ids[lo:hi],
                            word_index=a.word_index[lo:hi],
                            word_span=(first, last),
                            words=chunk_words,
                            truncated_word=truncated))
    return chunks


def project_word_labels(labels: Sequence[LabelId], a: SubtokenAlignment) -> list[LabelId]:
    """Copy each word's label onto all of its subtokens."""
    if len(labels) != a.word_count:
        raise LengthMismatchError(f"{len(labels)} labels vs {a.word_count} words")
    return [labels[w] for w in a.word_index]


def _check_rows(rows: np.ndarray, n_expected: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != NUM_CLASSES:
        raise MalformedDistributionError(f"expected rows of shape (n, {NUM_CLASSES}), got {rows.shape}")
    if rows.shape[0] != n_expected:
        raise LengthMismatchError(f"{rows.shape[0]} score rows vs {n_expected} subtokens")
    if np.any(rows < 0):
        raise MalformedDistributionError("negative probability in score row")
    sums = rows.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > DISTRIBUTION_ATOL):
        bad = int(np.argmax(np.abs(sums - 1.0)))
        raise MalformedDistributionError(f"row {bad} sums to {sums[bad]!r}, expected 1")
    return rows


def aggregate_to_words(scores: np.ndarray, a: SubtokenAlignment,
                       strategy: str = "mean") -> np.ndarray:
    """Collapse per-subtoken probability rows to one row per word.

    `mean` averages the rows of a word's subtokens and renormalizes;
    `first` takes the first subtoken's row. Output has a.word_count rows.
    """
    if strategy not in AGGREGATION_STRATEGIES:
        raise UnknownStrategyError(f"unknown aggregation strategy {strategy!r}")
    rows = _check_rows(scores, len(a.word_index))
    word_index = np.asarray(a.word_index, dtype=np.intp)

    out = np.zeros((a.word_count, NUM_CLASSES), dtype=np.float64)
    if strategy == "first":
        first_pos = np.full(a.word_count, -1, dtype=np.intp)
        seen = np.zeros(a.word_count, dtype=bool)
        for pos in range(len(word_index) - 1, -1, -1):
            first_pos[word_index[pos]] = pos
            seen[word_index[pos]] = True
        if not seen.all():
            raise LengthMismatchError("alignment does not cover every word")
        out = rows[first_pos]
    else:
        np.add.at(out, word_index, rows)
        counts = np.bincount(word_index, minlength=a.word_count)
        if np.any(counts == 0):
            raise LengthMismatchError("alignment does not cover every word")
        out /= counts[:, None]
    out /= out.sum(axis=1, keepdims=True)
    return out


def effective_alignment(chunks: Sequence[Chunk], word_count: int,
                        words: tuple[str, ...] | None = None) -> SubtokenAlignment:
    """Reassemble the alignment actually seen by a scorer from its chunks.

    Equals the original alignment unless a word was truncated, in which case
    the dropped subtokens are absent here too, keeping score rows and
    positions in one-to-one correspondence.
    """
    subtoken_ids: list[int] = []
    word_index: list[int] = []
    for chunk in sorted(chunks, key=lambda c: c.word_span):
        subtoken_ids.extend(chunk.subtoken_ids)
        word_index.extend(chunk.word_index)
    return SubtokenAlignment(subtoken_ids=tuple(subtoken_ids),
                             word_index=tuple(word_index),
                             word_count=word_count,
                             words=words)
