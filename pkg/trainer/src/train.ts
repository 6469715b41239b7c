// Fine-tuning harness: split, train with bottom-layer freezing, round to
// float32, predict the dev split, export the artifact, and score the dev
// predictions with the detector CLI (the detector owns the metric).

import * as fs from 'node:fs';
import * as path from 'node:path';
import {
  aggregateMean,
  alignWords,
  chunkAlignment,
  ChunkSlice,
  argmaxRows,
  projectWordLabels,
} from './chunking.js';
import { configHash, PRESETS, resolveConfig, TrainConfig, TrainConfigInput } from './config.js';
import { Doc, NUM_CLASSES, splitTrainDev, writeDataset } from './data.js';
import { freezeBottomLayers, FreezeReport, frozenGroups } from './freeze.js';
import {
  Arch,
  forward,
  initParams,
  lossAndGrad,
  roundToF32,
  TaggerParams,
  zeroGrads,
  zeroParams,
} from './model.js';
import { Adam } from './optim.js';
import { evaluateWithDetector } from './pycli.js';
import { derive, shuffle } from './rng.js';
import { buildVocab, GreedyTokenizer, SPECIAL_TOKEN_OVERHEAD } from './tokenizer.js';
import { exportArtifact } from './artifact.js';

interface TrainingChunk {
  ids: number[];
  targets: number[];
  tokens: number;
}

function trainingChunks(doc: Doc, tok: GreedyTokenizer, inputLength: number): TrainingChunk[] {
  const a = alignWords(doc.words, tok);
  const out: TrainingChunk[] = [];
  for (const chunk of chunkAlignment(a, inputLength, SPECIAL_TOKEN_OVERHEAD)) {
    // chunk.wordIndex projects each word's label onto its subtokens, and
    // handles oversize truncation for free
    const targets = projectWordLabels(doc.labels, chunk.wordIndex, a.wordCount);
    out.push({
      ids: [tok.bosId, ...chunk.ids, tok.eosId],
      targets: [-1, ...targets, -1],
      tokens: targets.length,
    });
  }
  return out;
}

export interface DevPrediction {
  docId: string;
  labels: number[];
}

// Mirror of the detector's predict pipeline (chunk, score, mean-aggregate,
// lowest-id argmax) run with the trainer's own weights.
export function predictDoc(params: TaggerParams, tok: GreedyTokenizer,
                           doc: Doc, inputLength: number): number[] {
  const a = alignWords(doc.words, tok);
  const chunks = chunkAlignment(a, inputLength, SPECIAL_TOKEN_OVERHEAD);
  const effectiveIndex: number[] = [];
  const rowChunks: Float64Array[] = [];
  let totalRows = 0;
  for (const chunk of chunks) {
    const probs = forward(params, [tok.bosId, ...chunk.ids, tok.eosId]);
    const content = probs.subarray(NUM_CLASSES, probs.length - NUM_CLASSES);
    rowChunks.push(Float64Array.from(content));
    totalRows += chunk.ids.length;
    effectiveIndex.push(...chunk.wordIndex);
  }
  const rows = new Float64Array(totalRows * NUM_CLASSES);
  let at = 0;
  for (const block of rowChunks) {
    rows.set(block, at);
    at += block.length;
  }
  const dists = aggregateMean(rows, NUM_CLASSES, effectiveIndex, a.wordCount);
  return argmaxRows(dists, NUM_CLASSES);
}

export interface FinetuneOptions {
  outDir: string;
  log?: (message: string) => void;
}

export interface FinetuneResult {
  config: TrainConfig;
  configHash: string;
  artifactDir: string;
  devGoldPath: string;
  devPredPath: string;
  devMacroF1: number;
  devMacroF1Pct: string;
  devPredictions: DevPrediction[];
  freezeReport: FreezeReport;
  epochLosses: number[];
  trainDocCount: number;
  devDocCount: number;
}

export function finetune(input: TrainConfigInput, docs: Doc[],
                         options: FinetuneOptions): FinetuneResult {
  const config = resolveConfig(input);
  const hash = configHash(config);
  const log = options.log ?? (() => undefined);
  const preset = PRESETS[config.preset];

  const { train, dev } = splitTrainDev(docs, config.valFraction, config.seed);
  log(`split: ${train.length} train / ${dev.length} dev documents`);

  const tok = buildVocab(train.flatMap((doc) => doc.words));
  const arch: Arch = {
    vocabSize: tok.vocabSize,
    hiddenSize: config.hiddenSize,
    ffnSize: config.ffnSize,
    layers: preset.layers,
  };
  const params = initParams(arch, config.inputLength, derive(config.seed, 1));
  const freezeReport = freezeBottomLayers(params, config.frozenLayers);
  log(`graph: vocab ${arch.vocabSize}, hidden ${arch.hiddenSize}, ffn ${arch.ffnSize}, ` +
      `layers ${arch.layers}; ${freezeReport.trainableParams} trainable / ` +
      `${freezeReport.frozenParams} frozen parameters`);

  const grads = zeroParams(arch, config.inputLength);
  const optimizer = new Adam(params, grads, frozenGroups(config.frozenLayers, arch.layers),
                             config.learningRate);

  const perDocChunks = train.map((doc) => trainingChunks(doc, tok, config.inputLength));
  const shuffleRng = derive(config.seed, 2);
  const order = perDocChunks.map((_, i) => i);

  const epochLosses: number[] = [];
  for (let epoch = 0; epoch < config.epochs; epoch++) {
    shuffle(order, shuffleRng);
    let epochCe = 0;
    let epochTokens = 0;
    for (let start = 0; start < order.length; start += config.batchSize) {
      const batch = order.slice(start, start + config.batchSize)
        .flatMap((i) => perDocChunks[i]);
      const batchTokens = batch.reduce((sum, chunk) => sum + chunk.tokens, 0);
      if (batchTokens === 0) continue;
      zeroGrads(grads);
      for (const chunk of batch) {
        const { ceSum, tokens } = lossAndGrad(params, chunk.ids, chunk.targets,
                                              grads, 1 / batchTokens);
        epochCe += ceSum;
        epochTokens += tokens;
      }
      optimizer.step();
    }
    const meanLoss = epochCe / epochTokens;
    epochLosses.push(meanLoss);
    log(`epoch ${epoch + 1}/${config.epochs}: loss ${meanLoss.toFixed(4)}`);
  }

  // The detector recomputes from the float32 artifact, so the trainer's own
  // dev predictions must come from float32-rounded weights too.
  roundToF32(params);

  const devPredictions: DevPrediction[] = dev.map((doc) => ({
    docId: doc.id,
    labels: predictDoc(params, tok, doc, config.inputLength),
  }));

  fs.mkdirSync(options.outDir, { recursive: true });
  const devGoldPath = path.join(options.outDir, 'dev.jsonl');
  const devPredPath = path.join(options.outDir, 'dev-pred.jsonl');
  writeDataset(dev, devGoldPath);
  fs.writeFileSync(
    devPredPath,
    devPredictions.map((p) => JSON.stringify({ doc_id: p.docId, labels: p.labels }) + '\n').join(''),
    'utf-8');

  const summary = evaluateWithDetector(devGoldPath, devPredPath);
  log(`dev macro-F1 (detector-computed): ${summary.macroF1Pct}`);

  const artifactDir = path.join(options.outDir, 'artifact');
  exportArtifact(artifactDir, {
    presetName: config.preset,
    params,
    tokenizer: tok,
    trainingConfigHash: hash,
    devMacroF1: summary.macroF1,
  });
  log(`artifact exported to ${artifactDir}`);

  return {
    config,
    configHash: hash,
    artifactDir,
    devGoldPath,
    devPredPath,
    devMacroF1: summary.macroF1,
    devMacroF1Pct: summary.macroF1Pct,
    devPredictions,
    freezeReport,
    epochLosses,
    trainDocCount: train.length,
    devDocCount: dev.length,
  };
}
