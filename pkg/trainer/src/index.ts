export { ablationRecord, writeAblationRecord } from './ablation.js';
export type { AblationRecord } from './ablation.js';
export {
  DEFAULT_LABEL_MAP,
  exportArtifact,
  METADATA_FILE,
  METADATA_FORMAT,
  MODEL_FILE,
  MODEL_FORMAT,
  TOKENIZER_FILE,
  TOKENIZER_FORMAT,
} from './artifact.js';
export type { ExportOptions } from './artifact.js';
export {
  aggregateMean,
  alignWords,
  argmaxRows,
  chunkAlignment,
  projectWordLabels,
} from './chunking.js';
export type { Alignment, ChunkSlice } from './chunking.js';
export {
  configHash,
  DEFAULT_EPOCHS,
  DEFAULT_LEARNING_RATE,
  DEFAULT_SCHEDULER,
  DEFAULT_VAL_FRACTION,
  FROZEN_LAYER_GRID,
  INPUT_LENGTH_GRID,
  PRESETS,
  resolveConfig,
  validateConfig,
} from './config.js';
export type { PresetSpec, TrainConfig, TrainConfigInput } from './config.js';
export {
  datasetToJsonl,
  NUM_CLASSES,
  readDataset,
  splitTrainDev,
  syntheticCorpus,
  writeDataset,
} from './data.js';
export type { Doc, Split, SyntheticCorpus, SyntheticOptions } from './data.js';
export {
  ConfigError,
  DataFormatError,
  DetectorCliError,
  KOutOfRangeError,
  TrainerError,
} from './errors.js';
export { formatFreezeReport, freezeBottomLayers, frozenGroups } from './freeze.js';
export type { FreezeReport, LayerParamCount } from './freeze.js';
export {
  forward,
  initParams,
  LN_EPS,
  lossAndGrad,
  paramTensors,
  roundToF32,
  zeroGrads,
  zeroParams,
  zerosMat,
} from './model.js';
export type { Arch, LayerParams, Mat, NamedTensor, TaggerParams } from './model.js';
export { Adam } from './optim.js';
export {
  detectorCommand,
  evaluateWithDetector,
  predictWithDetector,
  runDetector,
} from './pycli.js';
export type { EvalSummary, PredictedDoc } from './pycli.js';
export { derive, mulberry32, normal, randInt, shuffle } from './rng.js';
export type { Rng } from './rng.js';
export { buildVocab, GreedyTokenizer, SPECIAL_TOKEN_OVERHEAD } from './tokenizer.js';
export { finetune, predictDoc } from './train.js';
export type { DevPrediction, FinetuneOptions, FinetuneResult } from './train.js';
