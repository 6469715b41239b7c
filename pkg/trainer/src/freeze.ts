// Bottom-layer freezing: layers 0..k-1 (the embedding-adjacent ones) are
// excluded from optimization. Gradients still flow through frozen layers so
// the embedding underneath keeps training; freezing is purely an
// optimizer-side mask. The embedding, positional table, and head are never
// frozen by this operation.

import { KOutOfRangeError } from './errors.js';
import { paramTensors, TaggerParams } from './model.js';

export interface LayerParamCount {
  layer: number;
  params: number;
  frozen: boolean;
}

export interface FreezeReport {
  k: number;
  layerCount: number;
  trainableParams: number;
  frozenParams: number;
  trainableLayerParams: number;
  frozenLayerParams: number;
  embeddingParams: number;
  positionalParams: number;
  headParams: number;
  perLayer: LayerParamCount[];
}

export function frozenGroups(k: number, layerCount: number): Set<string> {
  if (!Number.isInteger(k) || k < 0 || k > layerCount) {
    throw new KOutOfRangeError(`k must be an integer in 0..${layerCount}, got ${k}`);
  }
  const groups = new Set<string>();
  for (let i = 0; i < k; i++) groups.add(`layer:${i}`);
  return groups;
}

export function freezeBottomLayers(params: TaggerParams, k: number): FreezeReport {
  const layerCount = params.layers.length;
  const frozen = frozenGroups(k, layerCount);

  const report: FreezeReport = {
    k,
    layerCount,
    trainableParams: 0,
    frozenParams: 0,
    trainableLayerParams: 0,
    frozenLayerParams: 0,
    embeddingParams: 0,
    positionalParams: 0,
    headParams: 0,
    perLayer: [],
  };
  const perLayer = new Map<number, LayerParamCount>();
  for (const t of paramTensors(params)) {
    const size = t.m.data.length;
    const isFrozen = frozen.has(t.group);
    if (isFrozen) report.frozenParams += size;
    else report.trainableParams += size;
    if (t.group === 'embedding') report.embeddingParams += size;
    if (t.group === 'positional') report.positionalParams += size;
    if (t.group === 'head') report.headParams += size;
    if (t.group.startsWith('layer:')) {
      const index = Number(t.group.slice('layer:'.length));
      if (isFrozen) report.frozenLayerParams += size;
      else report.trainableLayerParams += size;
      const entry = perLayer.get(index) ?? { layer: index, params: 0, frozen: isFrozen };
      entry.params += size;
      perLayer.set(index, entry);
    }
  }
  report.perLayer = [...perLayer.values()].sort((a, b) => a.layer - b.layer);
  return report;
}

export function formatFreezeReport(report: FreezeReport): string {
  const lines = [
    `frozen bottom layers: ${report.k} of ${report.layerCount}`,
    `trainable parameters: ${report.trainableParams}`,
    `frozen parameters:    ${report.frozenParams}`,
    `  encoder layers: ${report.trainableLayerParams} trainable / ${report.frozenLayerParams} frozen`,
    `  embedding ${report.embeddingParams} + positional ${report.positionalParams} + head ${report.headParams} (always trainable)`,
  ];
  return lines.join('\n');
}
