import { createHash } from 'node:crypto';
import { ConfigError, KOutOfRangeError } from './errors.js';

export interface PresetSpec {
  name: string;
  paramsMillions: number;
  hiddenSize: number;
  layers: number;
}

// Encoder family the detector's artifacts are keyed to. The artifact loader
// pins the layer count to the preset but leaves the width free, so smoke
// runs may shrink hiddenSize/ffnSize while keeping the full depth.
export const PRESETS: Record<string, PresetSpec> = {
  Xsmall: { name: 'Xsmall', paramsMillions: 22, hiddenSize: 384, layers: 12 },
  Small: { name: 'Small', paramsMillions: 44, hiddenSize: 768, layers: 6 },
  Base: { name: 'Base', paramsMillions: 86, hiddenSize: 768, layers: 12 },
  Large: { name: 'Large', paramsMillions: 304, hiddenSize: 1024, layers: 24 },
};

export const INPUT_LENGTH_GRID = [256, 512, 1024, 2048] as const;
export const FROZEN_LAYER_GRID = [0, 6, 12, 18] as const;

export interface TrainConfig {
  preset: string;
  frozenLayers: number;
  inputLength: number;
  batchSize: number;
  learningRate: number;
  scheduler: 'constant';
  epochs: number;
  seed: number;
  valFraction: number;
  hiddenSize: number;
  ffnSize: number;
}

export interface TrainConfigInput {
  preset: string;
  frozenLayers: number;
  inputLength: number;
  batchSize?: number;
  learningRate?: number;
  epochs?: number;
  seed?: number;
  valFraction?: number;
  hiddenSize?: number;
  ffnSize?: number;
}

// Repo-chosen training constants, shared across all runs. Upstream sources
// for this model family never published theirs, so these are ours and are
// tuned for the bundled smoke corpora, not for full-width encoders.
export const DEFAULT_LEARNING_RATE = 1e-3;
export const DEFAULT_EPOCHS = 40;
export const DEFAULT_VAL_FRACTION = 0.2;
export const DEFAULT_SCHEDULER = 'constant' as const;

export function resolveConfig(input: TrainConfigInput): TrainConfig {
  const preset = PRESETS[input.preset];
  if (!preset) {
    throw new ConfigError(
      `unknown preset ${JSON.stringify(input.preset)}; expected one of ${Object.keys(PRESETS).join(', ')}`);
  }
  const hiddenSize = input.hiddenSize ?? preset.hiddenSize;
  const config: TrainConfig = {
    preset: preset.name,
    frozenLayers: input.frozenLayers,
    inputLength: input.inputLength,
    batchSize: input.batchSize ?? (preset.name === 'Large' ? 4 : 16),
    learningRate: input.learningRate ?? DEFAULT_LEARNING_RATE,
    scheduler: DEFAULT_SCHEDULER,
    epochs: input.epochs ?? DEFAULT_EPOCHS,
    seed: input.seed ?? 0,
    valFraction: input.valFraction ?? DEFAULT_VAL_FRACTION,
    hiddenSize,
    ffnSize: input.ffnSize ?? hiddenSize * 4,
  };
  validateConfig(config);
  return config;
}

export function validateConfig(config: TrainConfig): void {
  const preset = PRESETS[config.preset];
  if (!preset) {
    throw new ConfigError(`unknown preset ${JSON.stringify(config.preset)}`);
  }
  if (!(FROZEN_LAYER_GRID as readonly number[]).includes(config.frozenLayers)) {
    throw new KOutOfRangeError(
      `frozenLayers ${config.frozenLayers} not in {${FROZEN_LAYER_GRID.join(', ')}}`);
  }
  if (config.frozenLayers > preset.layers) {
    throw new KOutOfRangeError(
      `frozenLayers ${config.frozenLayers} exceeds the ${preset.layers} layers of preset ${preset.name}`);
  }
  if (!(INPUT_LENGTH_GRID as readonly number[]).includes(config.inputLength)) {
    throw new ConfigError(
      `inputLength ${config.inputLength} not in {${INPUT_LENGTH_GRID.join(', ')}}`);
  }
  if (!Number.isInteger(config.batchSize) || config.batchSize < 1) {
    throw new ConfigError(`batchSize must be a positive integer, got ${config.batchSize}`);
  }
  if (!(config.learningRate > 0)) {
    throw new ConfigError(`learningRate must be > 0, got ${config.learningRate}`);
  }
  if (!Number.isInteger(config.epochs) || config.epochs < 1) {
    throw new ConfigError(`epochs must be a positive integer, got ${config.epochs}`);
  }
  if (!(config.valFraction > 0 && config.valFraction < 1)) {
    throw new ConfigError(`valFraction must be in (0, 1), got ${config.valFraction}`);
  }
  if (!Number.isInteger(config.hiddenSize) || config.hiddenSize < 1) {
    throw new ConfigError(`hiddenSize must be a positive integer, got ${config.hiddenSize}`);
  }
  if (!Number.isInteger(config.ffnSize) || config.ffnSize < 1) {
    throw new ConfigError(`ffnSize must be a positive integer, got ${config.ffnSize}`);
  }
}

// Stable hash of the full config; recorded in artifact metadata so a model
// can be traced back to the exact run that produced it.
export function configHash(config: TrainConfig): string {
  const keys = Object.keys(config).sort();
  const canonical = JSON.stringify(config, keys);
  return createHash('sha256').update(canonical, 'utf-8').digest('hex').slice(0, 16);
}
