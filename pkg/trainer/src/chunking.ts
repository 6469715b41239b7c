// Word/subtoken alignment, budget chunking, and word-level aggregation,
// mirroring the detector's pipeline. The trainer's own dev predictions must
// match what the detector later computes from the exported artifact, so the
// semantics here (greedy fill, oversize truncation, mean aggregation,
// lowest-id argmax ties) are kept identical.

import { DataFormatError } from './errors.js';
import { GreedyTokenizer, SPECIAL_TOKEN_OVERHEAD } from './tokenizer.js';

export interface Alignment {
  subtokenIds: number[];
  wordIndex: number[];
  wordCount: number;
}

export interface ChunkSlice {
  ids: number[];
  wordIndex: number[];
  wordSpan: [number, number];
  truncatedWord: number | null;
}

export function alignWords(words: string[], tok: GreedyTokenizer): Alignment {
  if (words.length === 0) {
    throw new DataFormatError('cannot align an empty word sequence');
  }
  const subtokenIds: number[] = [];
  const wordIndex: number[] = [];
  for (let i = 0; i < words.length; i++) {
    for (const id of tok.encode(words[i])) {
      subtokenIds.push(id);
      wordIndex.push(i);
    }
  }
  return { subtokenIds, wordIndex, wordCount: words.length };
}

// Greedy left-to-right fill under capacity = maxSubtokens - overhead. A word
// never splits across chunks; a word that alone exceeds the capacity is cut
// to capacity, flagged, and sits alone in its chunk.
export function chunkAlignment(a: Alignment, maxSubtokens: number,
                               overhead = SPECIAL_TOKEN_OVERHEAD): ChunkSlice[] {
  const capacity = maxSubtokens - overhead;
  if (capacity < 1) {
    throw new DataFormatError(
      `capacity ${capacity} (maxSubtokens ${maxSubtokens} - overhead ${overhead}) must be >= 1`);
  }
  const starts = new Array<number>(a.wordCount).fill(0);
  const counts = new Array<number>(a.wordCount).fill(0);
  let prev = -1;
  for (let pos = 0; pos < a.wordIndex.length; pos++) {
    const w = a.wordIndex[pos];
    if (w !== prev) {
      starts[w] = pos;
      prev = w;
    }
    counts[w]++;
  }

  const chunks: ChunkSlice[] = [];
  let word = 0;
  while (word < a.wordCount) {
    const first = word;
    let used = 0;
    let truncated: number | null = null;
    let takeEnd = starts[word];
    while (word < a.wordCount) {
      const n = counts[word];
      if (used === 0 && n > capacity) {
        truncated = word;
        takeEnd = starts[word] + capacity;
        word++;
        break;
      }
      if (used + n > capacity) break;
      used += n;
      takeEnd = starts[word] + n;
      word++;
    }
    const last = word - 1;
    const lo = starts[first];
    chunks.push({
      ids: a.subtokenIds.slice(lo, takeEnd),
      wordIndex: a.wordIndex.slice(lo, takeEnd),
      wordSpan: [first, last],
      truncatedWord: truncated,
    });
  }
  return chunks;
}

export function projectWordLabels(labels: number[], wordIndex: number[],
                                  wordCount: number): number[] {
  if (labels.length !== wordCount) {
    throw new DataFormatError(`${labels.length} labels vs ${wordCount} words`);
  }
  return wordIndex.map((w) => labels[w]);
}

// Mean-aggregate per-subtoken probability rows (numClasses wide, flattened
// row-major) to one row per word, renormalized. Rows must cover every word.
export function aggregateMean(rows: Float64Array, numClasses: number,
                              wordIndex: number[], wordCount: number): Float64Array {
  if (rows.length !== wordIndex.length * numClasses) {
    throw new DataFormatError(
      `${rows.length / numClasses} score rows vs ${wordIndex.length} subtokens`);
  }
  const out = new Float64Array(wordCount * numClasses);
  const perWord = new Array<number>(wordCount).fill(0);
  for (let pos = 0; pos < wordIndex.length; pos++) {
    const w = wordIndex[pos];
    perWord[w]++;
    for (let c = 0; c < numClasses; c++) {
      out[w * numClasses + c] += rows[pos * numClasses + c];
    }
  }
  for (let w = 0; w < wordCount; w++) {
    if (perWord[w] === 0) {
      throw new DataFormatError('alignment does not cover every word');
    }
    let sum = 0;
    for (let c = 0; c < numClasses; c++) sum += out[w * numClasses + c];
    for (let c = 0; c < numClasses; c++) out[w * numClasses + c] /= sum;
  }
  return out;
}

// Argmax per row; ties break toward the lowest class id (first maximum).
export function argmaxRows(rows: Float64Array, numClasses: number): number[] {
  const n = rows.length / numClasses;
  const labels = new Array<number>(n);
  for (let i = 0; i < n; i++) {
    let best = 0;
    for (let c = 1; c < numClasses; c++) {
      if (rows[i * numClasses + c] > rows[i * numClasses + best]) best = c;
    }
    labels[i] = best;
  }
  return labels;
}
