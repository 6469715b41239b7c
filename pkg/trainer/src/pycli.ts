// File-interchange bridge to the detector CLI. The dev metric and the
// round-trip checks deliberately go through `mgtdetect evaluate` and
// `mgtdetect predict` instead of reimplementing either: one metric
// definition, one inference implementation.

import { execFileSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { DetectorCliError } from './errors.js';

export function detectorCommand(): { file: string; prefix: string[] } {
  const python = process.env.MGTDETECT_PYTHON ?? 'python3';
  return { file: python, prefix: ['-m', 'mgtdetect'] };
}

export function runDetector(args: string[]): string {
  const { file, prefix } = detectorCommand();
  try {
    return execFileSync(file, [...prefix, ...args], { encoding: 'utf-8' });
  } catch (err) {
    const e = err as { status?: number; stderr?: string; message?: string };
    throw new DetectorCliError(
      `mgtdetect ${args[0]} failed (exit ${e.status ?? '?'}): ${e.stderr?.trim() || e.message}`);
  }
}

export interface EvalSummary {
  macroF1: number;
  macroF1Pct: string;
}

export function evaluateWithDetector(goldPath: string, predPath: string): EvalSummary {
  const tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'mgtdetect-eval-'));
  try {
    const reportPath = path.join(tmp, 'report.json');
    runDetector(['evaluate', '--gold', goldPath, '--pred', predPath,
                 '--json-out', reportPath]);
    const report = JSON.parse(fs.readFileSync(reportPath, 'utf-8')) as {
      macro_f1: number;
      macro_f1_pct: string;
    };
    return { macroF1: report.macro_f1, macroF1Pct: report.macro_f1_pct };
  } finally {
    fs.rmSync(tmp, { recursive: true, force: true });
  }
}

export interface PredictedDoc {
  doc_id: string;
  labels: number[];
}

export function predictWithDetector(artifactDir: string, dataPath: string,
                                    maxSubtokens: number, outPath: string): PredictedDoc[] {
  runDetector(['predict', '--backend', 'artifact', '--model-dir', artifactDir,
               '--data', dataPath, '--max-subtokens', String(maxSubtokens),
               '--out-file', outPath]);
  return fs.readFileSync(outPath, 'utf-8')
    .split('\n')
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as PredictedDoc);
}
