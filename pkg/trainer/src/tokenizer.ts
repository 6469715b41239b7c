// Greedy longest-prefix-match subtokenizer, identical to the detector's
// subtok-greedy/1 semantics: the exported vocab list alone must reproduce
// every encoding bit for bit on the detector side.

export const SPECIAL_TOKEN_OVERHEAD = 2;

export class GreedyTokenizer {
  readonly vocab: string[];
  readonly unkId: number;
  readonly bosId: number;
  readonly eosId: number;
  private readonly pieceToId: Map<string, number>;
  private readonly maxPieceLen: number;

  constructor(vocab: string[], unkId: number, bosId: number, eosId: number) {
    this.vocab = vocab.slice();
    this.unkId = unkId;
    this.bosId = bosId;
    this.eosId = eosId;
    // special-token strings are never matched inside words
    const special = new Set([unkId, bosId, eosId]);
    this.pieceToId = new Map();
    for (let i = 0; i < vocab.length; i++) {
      if (!special.has(i)) this.pieceToId.set(vocab[i], i);
    }
    let longest = 1;
    for (const piece of this.pieceToId.keys()) {
      if (piece.length > longest) longest = piece.length;
    }
    this.maxPieceLen = longest;
  }

  get vocabSize(): number {
    return this.vocab.length;
  }

  encode(word: string): number[] {
    const ids: number[] = [];
    let pos = 0;
    while (pos < word.length) {
      let matched = false;
      for (let end = Math.min(word.length, pos + this.maxPieceLen); end > pos; end--) {
        const id = this.pieceToId.get(word.slice(pos, end));
        if (id !== undefined) {
          ids.push(id);
          pos = end;
          matched = true;
          break;
        }
      }
      if (!matched) {
        ids.push(this.unkId);
        pos += 1;
      }
    }
    return ids.length ? ids : [this.unkId];
  }
}

// Vocab = specials, then every character seen, then whole-word pieces for
// words of wholeWordMinLen or more. Characters guarantee total coverage;
// whole words keep frequent words single-piece. Sorted for determinism.
export function buildVocab(words: Iterable<string>, wholeWordMinLen = 3): GreedyTokenizer {
  const chars = new Set<string>();
  const whole = new Set<string>();
  for (const word of words) {
    for (const ch of word) chars.add(ch);
    if (word.length >= wholeWordMinLen) whole.add(word);
  }
  const vocab = ['<unk>', '<bos>', '<eos>', ...[...chars].sort(), ...[...whole].sort()];
  return new GreedyTokenizer(vocab, 0, 1, 2);
}
