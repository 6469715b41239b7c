import { describe, expect, it } from 'vitest';
import { KOutOfRangeError } from '../src/errors.js';
import { freezeBottomLayers, frozenGroups } from '../src/freeze.js';
import { Arch, initParams } from '../src/model.js';
import { derive } from '../src/rng.js';

// 12-layer depth at toy width: freezing semantics only count parameters
const arch: Arch = { vocabSize: 5, hiddenSize: 4, ffnSize: 8, layers: 12 };
const params = initParams(arch, 8, derive(0, 1));

describe('freezeBottomLayers', () => {
  it('k=0 leaves every parameter trainable', () => {
    const report = freezeBottomLayers(params, 0);
    expect(report.frozenParams).toBe(0);
    expect(report.frozenLayerParams).toBe(0);
    expect(report.perLayer.every((l) => !l.frozen)).toBe(true);
  });

  it('trainable parameter count is strictly decreasing in k', () => {
    let previous = Infinity;
    for (let k = 0; k <= arch.layers; k++) {
      const report = freezeBottomLayers(params, k);
      expect(report.trainableParams).toBeLessThan(previous);
      expect(report.trainableParams + report.frozenParams)
        .toBe(freezeBottomLayers(params, 0).trainableParams);
      previous = report.trainableParams;
    }
  });

  it('freezes from the embedding-adjacent side', () => {
    const report = freezeBottomLayers(params, 3);
    expect(report.perLayer.map((l) => l.frozen))
      .toEqual([true, true, true, ...Array(9).fill(false)]);
  });

  it('k = half the layers halves the trainable layer parameters exactly', () => {
    const all = freezeBottomLayers(params, 0).trainableLayerParams;
    const half = freezeBottomLayers(params, 6).trainableLayerParams;
    expect(half * 2).toBe(all);
  });

  it('full freeze leaves zero trainable layer parameters, head still trainable', () => {
    const report = freezeBottomLayers(params, arch.layers);
    expect(report.trainableLayerParams).toBe(0);
    expect(report.headParams).toBeGreaterThan(0);
    expect(report.trainableParams)
      .toBe(report.embeddingParams + report.positionalParams + report.headParams);
  });

  it('rejects k outside 0..layer count', () => {
    expect(() => freezeBottomLayers(params, -1)).toThrow(KOutOfRangeError);
    expect(() => freezeBottomLayers(params, 13)).toThrow(KOutOfRangeError);
    expect(() => freezeBottomLayers(params, 2.5)).toThrow(KOutOfRangeError);
  });
});

describe('frozenGroups', () => {
  it('names exactly the bottom k layer groups', () => {
    expect([...frozenGroups(2, 12)].sort()).toEqual(['layer:0', 'layer:1']);
    expect(frozenGroups(0, 12).size).toBe(0);
  });
});
