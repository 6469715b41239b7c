// Sweep-cell records in the detector's ablation JSON shape, one file per
// run, so `mgtdetect ablate --records <dir>` can collate a sweep directly.

import * as fs from 'node:fs';
import { TrainConfig } from './config.js';

export interface AblationRecord {
  preset: string;
  frozen_layers: number;
  input_length: number;
  macro_f1_pct: number | null;
  status: 'ok' | 'dash';
}

export function ablationRecord(config: TrainConfig,
                               macroF1: number | null): AblationRecord {
  return {
    preset: config.preset,
    frozen_layers: config.frozenLayers,
    input_length: config.inputLength,
    macro_f1_pct: macroF1 === null ? null : macroF1 * 100,
    status: macroF1 === null ? 'dash' : 'ok',
  };
}

export function writeAblationRecord(path: string, record: AblationRecord): void {
  fs.writeFileSync(path, JSON.stringify(record, null, 2) + '\n', 'utf-8');
}
