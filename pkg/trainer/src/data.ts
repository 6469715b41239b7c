// Corpus I/O in the detector's JSON-lines form, train/dev splitting, and a
// memorizable synthetic corpus for smoke fine-tunes.

import * as fs from 'node:fs';
import { DataFormatError } from './errors.js';
import { derive, randInt, Rng, shuffle } from './rng.js';

export const NUM_CLASSES = 4;

export interface Doc {
  id: string;
  words: string[];
  labels: number[];
}

function parseLine(line: string, lineNo: number): Doc {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch (err) {
    throw new DataFormatError(`line ${lineNo}: invalid JSON: ${err}`);
  }
  const record = raw as { id?: unknown; text?: unknown; tokens?: unknown; labels?: unknown };
  if (typeof record.id !== 'string' || typeof record.text !== 'string') {
    throw new DataFormatError(`line ${lineNo}: id and text must be strings`);
  }
  const words = Array.isArray(record.tokens)
    ? record.tokens.map(String)
    : record.text.split(/\s+/).filter((w) => w.length > 0);
  if (words.length === 0) {
    throw new DataFormatError(`line ${lineNo}: document ${record.id} has no words`);
  }
  if (!Array.isArray(record.labels)) {
    throw new DataFormatError(`line ${lineNo}: training documents need labels`);
  }
  const labels = record.labels.map((v) => {
    if (!Number.isInteger(v) || (v as number) < 0 || (v as number) >= NUM_CLASSES) {
      throw new DataFormatError(`line ${lineNo}: label ${v} outside 0..${NUM_CLASSES - 1}`);
    }
    return v as number;
  });
  if (labels.length !== words.length) {
    throw new DataFormatError(
      `line ${lineNo}: ${labels.length} labels vs ${words.length} words`);
  }
  return { id: record.id, words, labels };
}

export function readDataset(path: string): Doc[] {
  const text = fs.readFileSync(path, 'utf-8');
  const docs: Doc[] = [];
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    if (lines[i].trim().length === 0) continue;
    docs.push(parseLine(lines[i], i + 1));
  }
  if (docs.length === 0) {
    throw new DataFormatError(`no documents in ${path}`);
  }
  return docs;
}

export function datasetToJsonl(docs: Doc[]): string {
  return docs
    .map((doc) =>
      JSON.stringify({
        id: doc.id,
        text: doc.words.join(' '),
        tokens: doc.words,
        labels: doc.labels,
      }) + '\n')
    .join('');
}

export function writeDataset(docs: Doc[], path: string): void {
  fs.writeFileSync(path, datasetToJsonl(docs), 'utf-8');
}

export interface Split {
  train: Doc[];
  dev: Doc[];
}

// Seeded shuffle, then the first ceil(n * valFraction) documents become the
// dev split. Both splits keep at least one document.
export function splitTrainDev(docs: Doc[], valFraction: number, seed: number): Split {
  if (docs.length < 2) {
    throw new DataFormatError(`need at least 2 documents to split, got ${docs.length}`);
  }
  const order = docs.slice();
  shuffle(order, derive(seed, 101));
  const devCount = Math.min(docs.length - 1, Math.max(1, Math.ceil(docs.length * valFraction)));
  return { dev: order.slice(0, devCount), train: order.slice(devCount) };
}

// Word inventory for the synthetic corpus: per class, three plain words that
// the vocab builder will keep whole, plus one two-character word that always
// encodes as two single-character pieces ('q' is shared across classes, so
// its label is only decidable from the following character).
const CLASS_WORDS: string[][] = [
  ['alpha', 'argon', 'amber', 'qa'],
  ['bravo', 'basil', 'birch', 'qb'],
  ['cedar', 'comet', 'coral', 'qc'],
  ['delta', 'dunes', 'drift', 'qd'],
];

export interface SyntheticOptions {
  docs?: number;
  minWords?: number;
  maxWords?: number;
  longDocEvery?: number;
  longDocWords?: number;
  seed?: number;
}

export interface SyntheticCorpus {
  docs: Doc[];
  rule: Record<string, number>;
}

// Labels are a pure function of the word, so a model only has to memorize
// the word inventory; every few documents one is long enough to need
// several chunks at inputLength 256.
export function syntheticCorpus(options: SyntheticOptions = {}): SyntheticCorpus {
  const docCount = options.docs ?? 50;
  const minWords = options.minWords ?? 30;
  const maxWords = options.maxWords ?? 50;
  const longDocEvery = options.longDocEvery ?? 10;
  const longDocWords = options.longDocWords ?? 320;
  const rng: Rng = derive(options.seed ?? 0, 202);

  const rule: Record<string, number> = {};
  const inventory: { word: string; label: number }[] = [];
  for (let label = 0; label < CLASS_WORDS.length; label++) {
    for (const word of CLASS_WORDS[label]) {
      rule[word] = label;
      inventory.push({ word, label });
    }
  }

  const docs: Doc[] = [];
  for (let i = 0; i < docCount; i++) {
    const length = (i + 1) % longDocEvery === 0
      ? longDocWords
      : minWords + randInt(rng, maxWords - minWords + 1);
    const words: string[] = [];
    const labels: number[] = [];
    for (let j = 0; j < length; j++) {
      const pick = inventory[randInt(rng, inventory.length)];
      words.push(pick.word);
      labels.push(pick.label);
    }
    docs.push({ id: `syn-${String(i).padStart(3, '0')}`, words, labels });
  }
  return { docs, rule };
}
