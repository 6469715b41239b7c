import numpy as np
import pytest

from mgtdetect import (
    CharPieceSubtokenizer,
    VocabSubtokenizer,
    aggregate_to_words,
    align,
    chunk_alignment,
    effective_alignment,
    project_word_labels,
)
from mgtdetect.errors import (
    EmptyDocumentError,
    InvalidBudgetError,
    LengthMismatchError,
    MalformedDistributionError,
    UnknownStrategyError,
)


class CountTok:
    """Test double: emits a fixed subtoken count per word."""

    vocab_size = 1000
    special_token_overhead = 2

    def __init__(self, counts):
        self.counts = counts

    def encode(self, word):
        return [7] * self.counts[word]


def counted_alignment(counts):
    words = [f"w{i}" for i in range(len(counts))]
    tok = CountTok(dict(zip(words, counts)))
    return align(words, tok)


def test_align_word_index_counts():
    a = counted_alignment([4, 3])
    assert a.word_index == (0, 0, 0, 0, 1, 1, 1)
    assert a.word_count == 2


def test_align_single():
    a = counted_alignment([1])
    assert a.word_index == (0,)


def test_align_unit_counts():
    a = counted_alignment([1, 1, 1])
    assert a.word_index == (0, 1, 2)


def test_align_empty_words():
    with pytest.raises(EmptyDocumentError):
        align([], CountTok({}))


def test_align_keeps_word_strings():
    a = align(["aa", "b"], CharPieceSubtokenizer())
    assert a.words == ("aa", "b")


# -- chunking --

def test_chunk_greedy_no_split():
    a = counted_alignment([3, 4, 2])
    chunks = chunk_alignment(a, max_subtokens=8, overhead=2)  # capacity 6
    assert [c.word_span for c in chunks] == [(0, 0), (1, 2)]
    assert [len(c) for c in chunks] == [3, 6]
    assert all(c.truncated_word is None for c in chunks)


def test_chunk_single_when_under_budget():
    a = counted_alignment([2, 2, 1])
    chunks = chunk_alignment(a, max_subtokens=16, overhead=2)
    assert len(chunks) == 1
    assert chunks[0].word_span == (0, 2)


def test_chunk_truncates_oversize_word():
    a = counted_alignment([9])
    chunks = chunk_alignment(a, max_subtokens=8, overhead=2)
    assert len(chunks) == 1
    assert len(chunks[0]) == 6
    assert chunks[0].truncated_word == 0
    assert chunks[0].word_span == (0, 0)


def test_chunk_oversize_word_sits_alone():
    a = counted_alignment([1, 9, 1])
    chunks = chunk_alignment(a, max_subtokens=8, overhead=2)
    assert [c.word_span for c in chunks] == [(0, 0), (1, 1), (2, 2)]
    assert chunks[1].truncated_word == 1
    assert len(chunks[1]) == 6


def test_chunk_invalid_budget():
    a = counted_alignment([1])
    with pytest.raises(InvalidBudgetError):
        chunk_alignment(a, max_subtokens=2, overhead=2)


def test_chunk_partition_properties_random():
    """Chunks partition the words in order, respect the budget, and never
    split a word unless it alone exceeds the capacity."""
    rng = np.random.default_rng(202)
    for _ in range(300):
        n_words = int(rng.integers(1, 40))
        counts = [int(v) for v in rng.integers(1, 9, size=n_words)]
        capacity = int(rng.integers(4, 20))
        a = counted_alignment(counts)
        chunks = chunk_alignment(a, max_subtokens=capacity + 2, overhead=2)

        spans = [c.word_span for c in chunks]
        assert spans[0][0] == 0
        assert spans[-1][1] == n_words - 1
        for (_, last), (nxt, _) in zip(spans, spans[1:]):
            assert nxt == last + 1
        for c in chunks:
            assert len(c) <= capacity
            if c.truncated_word is None:
                expected = sum(counts[c.word_span[0]:c.word_span[1] + 1])
                assert len(c) == expected
            else:
                assert c.word_span[0] == c.word_span[1] == c.truncated_word
                assert counts[c.truncated_word] > capacity
                assert len(c) == capacity


def test_chunk_count_monotone_in_capacity():
    rng = np.random.default_rng(203)
    for _ in range(100):
        counts = [int(v) for v in rng.integers(1, 6, size=25)]
        a = counted_alignment(counts)
        sizes = [len(chunk_alignment(a, max_subtokens=cap + 2, overhead=2))
                 for cap in range(6, 40)]
        assert all(x >= y for x, y in zip(sizes, sizes[1:]))


def test_chunk_word_index_stays_absolute():
    a = counted_alignment([2, 2, 2])
    chunks = chunk_alignment(a, max_subtokens=6, overhead=2)
    assert chunks[0].word_index == (0, 0, 1, 1)
    assert chunks[1].word_index == (2, 2)


# -- label projection --

def test_project_word_labels_examples():
    a = counted_alignment([2, 1])
    assert project_word_labels([1, 0], a) == [1, 1, 0]
    b = counted_alignment([1, 2, 1])
    assert project_word_labels([0, 1, 2], b) == [0, 1, 1, 2]


def test_project_word_labels_mismatch():
    a = counted_alignment([2, 1])
    with pytest.raises(LengthMismatchError):
        project_word_labels([0], a)


# -- aggregation --

def one_hot(i):
    row = [0.0] * 4
    row[i] = 1.0
    return row


def test_aggregate_mean_example():
    a = counted_alignment([2])
    rows = np.array([one_hot(0), one_hot(1)])
    out = aggregate_to_words(rows, a, "mean")
    assert np.allclose(out, [[0.5, 0.5, 0.0, 0.0]])


def test_aggregate_first_example():
    a = counted_alignment([2])
    rows = np.array([one_hot(0), one_hot(1)])
    out = aggregate_to_words(rows, a, "first")
    assert np.allclose(out, [one_hot(0)])


def test_aggregate_single_subtoken_identity():
    a = counted_alignment([1, 1])
    rows = np.array([[0.7, 0.1, 0.1, 0.1], [0.25, 0.25, 0.25, 0.25]])
    for strategy in ("mean", "first"):
        assert np.allclose(aggregate_to_words(rows, a, strategy), rows)


def test_aggregate_rows_normalized():
    rng = np.random.default_rng(404)
    for _ in range(100):
        counts = [int(v) for v in rng.integers(1, 5, size=10)]
        a = counted_alignment(counts)
        raw = rng.random((sum(counts), 4)) + 1e-3
        raw /= raw.sum(axis=1, keepdims=True)
        out = aggregate_to_words(raw, a, "mean")
        assert out.shape == (10, 4)
        assert np.allclose(out.sum(axis=1), 1.0)


def test_aggregate_unknown_strategy():
    a = counted_alignment([1])
    with pytest.raises(UnknownStrategyError):
        aggregate_to_words(np.array([one_hot(0)]), a, "median")


def test_aggregate_malformed_rows():
    a = counted_alignment([2])
    with pytest.raises(LengthMismatchError):
        aggregate_to_words(np.array([one_hot(0)]), a)
    with pytest.raises(MalformedDistributionError):
        aggregate_to_words(np.array([[0.5, 0.5, 0.5, 0.5], one_hot(0)]), a)
    with pytest.raises(MalformedDistributionError):
        aggregate_to_words(np.array([[-0.1, 0.6, 0.3, 0.2], one_hot(0)]), a)
    with pytest.raises(MalformedDistributionError):
        aggregate_to_words(np.zeros((2, 3)), a)


# -- effective alignment --

def test_effective_alignment_identity_without_truncation():
    a = counted_alignment([3, 4, 2])
    chunks = chunk_alignment(a, max_subtokens=8, overhead=2)
    eff = effective_alignment(chunks, a.word_count, a.words)
    assert eff.subtoken_ids == a.subtoken_ids
    assert eff.word_index == a.word_index


def test_effective_alignment_drops_truncated_tail():
    a = counted_alignment([1, 9, 1])
    chunks = chunk_alignment(a, max_subtokens=8, overhead=2)
    eff = effective_alignment(chunks, a.word_count)
    # 1 + min(9, 6) + 1 positions survive
    assert len(eff) == 8
    assert eff.word_index == (0,) + (1,) * 6 + (2,)


# -- concrete subtokenizers --

def test_char_piece_counts():
    tok = CharPieceSubtokenizer(piece_len=4)
    assert len(tok.encode("ab")) == 1
    assert len(tok.encode("abcd")) == 1
    assert len(tok.encode("abcde")) == 2
    assert len(tok.encode("abcdefghi")) == 3
    # deterministic across instances
    assert tok.encode("chunking") == CharPieceSubtokenizer().encode("chunking")


def test_vocab_tok_greedy_longest_prefix():
    vocab = ["<unk>", "<bos>", "<eos>", "a", "ab", "abc", "b", "c"]
    tok = VocabSubtokenizer(vocab, unk_id=0, bos_id=1, eos_id=2)
    assert tok.encode("abc") == [5]
    assert tok.encode("abcc") == [5, 7]
    assert tok.encode("ba") == [6, 3]


def test_vocab_tok_unk_per_char():
    vocab = ["<unk>", "<bos>", "<eos>", "a"]
    tok = VocabSubtokenizer(vocab, unk_id=0, bos_id=1, eos_id=2)
    assert tok.encode("axa") == [3, 0, 3]
    assert tok.encode("zz") == [0, 0]


def test_vocab_tok_never_matches_special_strings():
    vocab = ["<unk>", "<bos>", "<eos>", "<", "b", "o", "s", ">"]
    tok = VocabSubtokenizer(vocab, unk_id=0, bos_id=1, eos_id=2)
    # "<bos>" decomposes into character pieces, not the special id
    assert 1 not in tok.encode("<bos>")
