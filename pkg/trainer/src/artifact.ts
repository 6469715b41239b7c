// Artifact export in the detector's directory format: metadata.json
// (tagger-artifact/1), model.json (tagger-graph/1), tokenizer.json
// (subtok-greedy/1). See docs/artifact-format.md at the repository root for
// the full contract. Weights must already be float32-rounded; JSON keeps
// the shortest decimal that round-trips, so the detector parses back the
// exact same float32 values.

import * as fs from 'node:fs';
import * as path from 'node:path';
import { Mat, TaggerParams } from './model.js';
import { GreedyTokenizer } from './tokenizer.js';
import { NUM_CLASSES } from './data.js';

export const METADATA_FORMAT = 'tagger-artifact/1';
export const MODEL_FORMAT = 'tagger-graph/1';
export const TOKENIZER_FORMAT = 'subtok-greedy/1';

export const METADATA_FILE = 'metadata.json';
export const MODEL_FILE = 'model.json';
export const TOKENIZER_FILE = 'tokenizer.json';

export const DEFAULT_LABEL_MAP: Record<string, string> = {
  '0': 'human',
  '1': 'synonym-replaced',
  '2': 'machine-generated',
  '3': 'summarized',
};

function rows(m: Mat): number[][] {
  const out: number[][] = [];
  for (let i = 0; i < m.rows; i++) {
    out.push(Array.from(m.data.subarray(i * m.cols, (i + 1) * m.cols)));
  }
  return out;
}

function flat(m: Mat): number[] {
  return Array.from(m.data);
}

export interface ExportOptions {
  presetName: string;
  params: TaggerParams;
  tokenizer: GreedyTokenizer;
  trainingConfigHash: string;
  devMacroF1: number | null;
  labelMap?: Record<string, string>;
}

export function exportArtifact(dir: string, options: ExportOptions): string {
  const { params, tokenizer } = options;
  if (tokenizer.vocabSize !== params.arch.vocabSize) {
    throw new RangeError(
      `tokenizer vocab ${tokenizer.vocabSize} vs graph vocab ${params.arch.vocabSize}`);
  }
  fs.mkdirSync(dir, { recursive: true });

  const model = {
    format: MODEL_FORMAT,
    preset: options.presetName,
    max_input_length: params.maxInputLength,
    num_classes: NUM_CLASSES,
    arch: {
      vocab_size: params.arch.vocabSize,
      hidden_size: params.arch.hiddenSize,
      ffn_size: params.arch.ffnSize,
      layers: params.arch.layers,
    },
    weights: {
      embedding: rows(params.embedding),
      positional: rows(params.positional),
      layers: params.layers.map((layer) => ({
        attn: {
          wq: rows(layer.wq), bq: flat(layer.bq),
          wk: rows(layer.wk), bk: flat(layer.bk),
          wv: rows(layer.wv), bv: flat(layer.bv),
          wo: rows(layer.wo), bo: flat(layer.bo),
        },
        ln1: { gamma: flat(layer.ln1Gamma), beta: flat(layer.ln1Beta) },
        ffn: {
          w1: rows(layer.w1), b1: flat(layer.b1),
          w2: rows(layer.w2), b2: flat(layer.b2),
        },
        ln2: { gamma: flat(layer.ln2Gamma), beta: flat(layer.ln2Beta) },
      })),
      head: { w: rows(params.headW), b: flat(params.headB) },
    },
  };

  const tokenizerJson = {
    format: TOKENIZER_FORMAT,
    preset: options.presetName,
    vocab: tokenizer.vocab,
    unk_id: tokenizer.unkId,
    bos_id: tokenizer.bosId,
    eos_id: tokenizer.eosId,
  };

  const metadata = {
    format: METADATA_FORMAT,
    preset: options.presetName,
    max_input_length: params.maxInputLength,
    num_classes: NUM_CLASSES,
    label_map: options.labelMap ?? DEFAULT_LABEL_MAP,
    training_config_hash: options.trainingConfigHash,
    dev_macro_f1: options.devMacroF1,
    model_file: MODEL_FILE,
    tokenizer_file: TOKENIZER_FILE,
  };

  fs.writeFileSync(path.join(dir, MODEL_FILE), JSON.stringify(model), 'utf-8');
  fs.writeFileSync(path.join(dir, TOKENIZER_FILE), JSON.stringify(tokenizerJson), 'utf-8');
  fs.writeFileSync(path.join(dir, METADATA_FILE), JSON.stringify(metadata, null, 2), 'utf-8');
  return dir;
}
