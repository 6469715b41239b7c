#!/usr/bin/env node
// Command line for single training runs and synthetic corpus generation.
// Sweeps launch one `train` process per grid cell and point the detector's
// `ablate` command at the record directory afterwards.

import * as path from 'node:path';
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { ablationRecord, writeAblationRecord } from './ablation.js';
import { FROZEN_LAYER_GRID, INPUT_LENGTH_GRID, PRESETS } from './config.js';
import { readDataset, syntheticCorpus, writeDataset } from './data.js';
import { TrainerError } from './errors.js';
import { formatFreezeReport } from './freeze.js';
import { finetune } from './train.js';

async function main(): Promise<number> {
  const parser = yargs(hideBin(process.argv))
    .scriptName('trainer')
    .command(
      'train',
      'fine-tune one tagger and export its artifact',
      (cmd) =>
        cmd
          .option('data', { type: 'string', demandOption: true, describe: 'labeled JSON-lines corpus' })
          .option('out', { type: 'string', demandOption: true, describe: 'run output directory' })
          .option('preset', { type: 'string', default: 'Small', choices: Object.keys(PRESETS) })
          .option('frozen-layers', { type: 'number', default: 0, choices: [...FROZEN_LAYER_GRID] })
          .option('input-length', { type: 'number', default: 256, choices: [...INPUT_LENGTH_GRID] })
          .option('epochs', { type: 'number' })
          .option('batch-size', { type: 'number' })
          .option('lr', { type: 'number' })
          .option('seed', { type: 'number', default: 0 })
          .option('val-fraction', { type: 'number' })
          .option('hidden-size', { type: 'number', describe: 'width override for smoke-scale runs' })
          .option('ffn-size', { type: 'number' })
          .option('record', { type: 'string', describe: 'also write an ablation record JSON here' })
          .option('quiet', { type: 'boolean', default: false }),
      (args) => {
        const docs = readDataset(args.data);
        const result = finetune(
          {
            preset: args.preset,
            frozenLayers: args['frozen-layers'],
            inputLength: args['input-length'],
            epochs: args.epochs,
            batchSize: args['batch-size'],
            learningRate: args.lr,
            seed: args.seed,
            valFraction: args['val-fraction'],
            hiddenSize: args['hidden-size'],
            ffnSize: args['ffn-size'],
          },
          docs,
          { outDir: args.out, log: args.quiet ? undefined : (m) => console.log(m) });
        console.log(formatFreezeReport(result.freezeReport));
        console.log(`dev macro-F1: ${result.devMacroF1Pct}`);
        console.log(`artifact: ${result.artifactDir}`);
        if (args.record) {
          writeAblationRecord(args.record, ablationRecord(result.config, result.devMacroF1));
          console.log(`record: ${args.record}`);
        }
      })
    .command(
      'synth',
      'write a memorizable synthetic corpus for smoke runs',
      (cmd) =>
        cmd
          .option('out', { type: 'string', demandOption: true })
          .option('docs', { type: 'number', default: 50 })
          .option('seed', { type: 'number', default: 0 }),
      (args) => {
        const { docs } = syntheticCorpus({ docs: args.docs, seed: args.seed });
        writeDataset(docs, args.out);
        console.log(`wrote ${docs.length} documents to ${path.resolve(args.out)}`);
      })
    .demandCommand(1)
    .strict()
    .help();

  await parser.parseAsync();
  return 0;
}

main()
  .then((code) => process.exit(code))
  .catch((err) => {
    if (err instanceof TrainerError) {
      console.error(`error: ${err.message}`);
      process.exit(2);
    }
    console.error(err);
    process.exit(1);
  });
