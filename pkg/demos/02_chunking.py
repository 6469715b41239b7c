"""
Subtoken alignment and budget-respecting chunking
=================================================

Long documents must be cut to the model's input size. Cutting by subtokens
while keeping words whole is the load-bearing fix: a chunk never splits a
word, so word-level labels stay well defined.
"""

from mgtdetect import CharPieceSubtokenizer, align, chunk_alignment

tok = CharPieceSubtokenizer(piece_len=4)

words = ["short", "a", "considerably-longer-word", "mid", "tiny"]
a = align(words, tok)
print("subtokens per word:", [a.word_index.count(i) for i in range(len(words))])
print("total subtokens:", len(a))

# capacity = max_subtokens - special-token overhead (2 here)
for max_subtokens in (8, 12, 32):
    chunks = chunk_alignment(a, max_subtokens, tok.special_token_overhead)
    print(f"max_subtokens={max_subtokens}:")
    for c in chunks:
        first, last = c.word_span
        print(f"  words [{first}..{last}] -> {len(c)} subtokens")

# a single word larger than the whole budget is truncated, and flagged
giant = align(["x" * 100], tok)
(chunk,) = chunk_alignment(giant, 8, tok.special_token_overhead)
print("oversize word kept", len(chunk), "subtokens; truncated_word =", chunk.truncated_word)
