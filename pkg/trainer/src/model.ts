// The tagger graph and its gradients. The forward pass follows the
// detector's serialized-graph semantics exactly: post-norm residual blocks,
// single-head scaled dot-product attention over the whole sequence, a
// tanh-approximation GELU feed-forward, layer-norm epsilon 1e-5, and a
// linear softmax head over 4 classes. Training runs in float64; weights are
// rounded to float32 before export and before dev prediction so the
// detector sees exactly what the trainer scored with.

import { NUM_CLASSES } from './data.js';
import { normal, Rng } from './rng.js';

export { NUM_CLASSES };

export const LN_EPS = 1e-5;
const GELU_C = Math.sqrt(2 / Math.PI);
const GELU_A = 0.044715;

export interface Mat {
  rows: number;
  cols: number;
  data: Float64Array;
}

export function zerosMat(rows: number, cols: number): Mat {
  return { rows, cols, data: new Float64Array(rows * cols) };
}

export interface Arch {
  vocabSize: number;
  hiddenSize: number;
  ffnSize: number;
  layers: number;
}

export interface LayerParams {
  wq: Mat; bq: Mat; wk: Mat; bk: Mat; wv: Mat; bv: Mat; wo: Mat; bo: Mat;
  ln1Gamma: Mat; ln1Beta: Mat;
  w1: Mat; b1: Mat; w2: Mat; b2: Mat;
  ln2Gamma: Mat; ln2Beta: Mat;
}

export interface TaggerParams {
  arch: Arch;
  maxInputLength: number;
  embedding: Mat;
  positional: Mat;
  layers: LayerParams[];
  headW: Mat;
  headB: Mat;
}

function fillNormal(m: Mat, rng: Rng, scale: number): Mat {
  for (let i = 0; i < m.data.length; i++) m.data[i] = normal(rng) * scale;
  return m;
}

function fillValue(m: Mat, value: number): Mat {
  m.data.fill(value);
  return m;
}

function zeroLayer(d: number, f: number): LayerParams {
  return {
    wq: zerosMat(d, d), bq: zerosMat(1, d),
    wk: zerosMat(d, d), bk: zerosMat(1, d),
    wv: zerosMat(d, d), bv: zerosMat(1, d),
    wo: zerosMat(d, d), bo: zerosMat(1, d),
    ln1Gamma: zerosMat(1, d), ln1Beta: zerosMat(1, d),
    w1: zerosMat(d, f), b1: zerosMat(1, f),
    w2: zerosMat(f, d), b2: zerosMat(1, d),
    ln2Gamma: zerosMat(1, d), ln2Beta: zerosMat(1, d),
  };
}

export function initParams(arch: Arch, maxInputLength: number, rng: Rng,
                           scale = 0.1): TaggerParams {
  const d = arch.hiddenSize;
  const f = arch.ffnSize;
  const layers: LayerParams[] = [];
  for (let i = 0; i < arch.layers; i++) {
    const layer = zeroLayer(d, f);
    for (const name of ['wq', 'bq', 'wk', 'bk', 'wv', 'bv', 'wo', 'bo',
                        'w1', 'b1', 'w2', 'b2'] as const) {
      fillNormal(layer[name], rng, scale);
    }
    fillValue(layer.ln1Gamma, 1);
    fillValue(layer.ln2Gamma, 1);
    layers.push(layer);
  }
  return {
    arch,
    maxInputLength,
    embedding: fillNormal(zerosMat(arch.vocabSize, d), rng, scale),
    positional: fillNormal(zerosMat(maxInputLength, d), rng, scale),
    layers,
    headW: fillNormal(zerosMat(d, NUM_CLASSES), rng, scale),
    headB: fillNormal(zerosMat(1, NUM_CLASSES), rng, scale),
  };
}

export function zeroParams(arch: Arch, maxInputLength: number): TaggerParams {
  const d = arch.hiddenSize;
  const f = arch.ffnSize;
  const layers: LayerParams[] = [];
  for (let i = 0; i < arch.layers; i++) layers.push(zeroLayer(d, f));
  return {
    arch,
    maxInputLength,
    embedding: zerosMat(arch.vocabSize, d),
    positional: zerosMat(maxInputLength, d),
    layers,
    headW: zerosMat(d, NUM_CLASSES),
    headB: zerosMat(1, NUM_CLASSES),
  };
}

export interface NamedTensor {
  path: string;
  group: string;
  m: Mat;
}

const LAYER_TENSOR_NAMES = [
  ['attn.wq', 'wq'], ['attn.bq', 'bq'], ['attn.wk', 'wk'], ['attn.bk', 'bk'],
  ['attn.wv', 'wv'], ['attn.bv', 'bv'], ['attn.wo', 'wo'], ['attn.bo', 'bo'],
  ['ln1.gamma', 'ln1Gamma'], ['ln1.beta', 'ln1Beta'],
  ['ffn.w1', 'w1'], ['ffn.b1', 'b1'], ['ffn.w2', 'w2'], ['ffn.b2', 'b2'],
  ['ln2.gamma', 'ln2Gamma'], ['ln2.beta', 'ln2Beta'],
] as const;

// Flat walk over every tensor; grads walk in the same order, which is what
// lets the optimizer pair them positionally.
export function paramTensors(p: TaggerParams): NamedTensor[] {
  const out: NamedTensor[] = [
    { path: 'embedding', group: 'embedding', m: p.embedding },
    { path: 'positional', group: 'positional', m: p.positional },
  ];
  for (let i = 0; i < p.layers.length; i++) {
    for (const [suffix, field] of LAYER_TENSOR_NAMES) {
      out.push({ path: `layers[${i}].${suffix}`, group: `layer:${i}`, m: p.layers[i][field] });
    }
  }
  out.push({ path: 'head.w', group: 'head', m: p.headW });
  out.push({ path: 'head.b', group: 'head', m: p.headB });
  return out;
}

export function zeroGrads(grads: TaggerParams): void {
  for (const t of paramTensors(grads)) t.m.data.fill(0);
}

// Round every weight to float32 in place; call before export and before any
// prediction the detector is expected to reproduce.
export function roundToF32(p: TaggerParams): void {
  for (const t of paramTensors(p)) {
    for (let i = 0; i < t.m.data.length; i++) t.m.data[i] = Math.fround(t.m.data[i]);
  }
}

// out = a @ b
function matmul(a: Mat, b: Mat): Mat {
  const out = zerosMat(a.rows, b.cols);
  matmulAcc(a, b, out);
  return out;
}

// out += a @ b
function matmulAcc(a: Mat, b: Mat, out: Mat): void {
  const n = a.rows, m = a.cols, p = b.cols;
  for (let i = 0; i < n; i++) {
    for (let k = 0; k < m; k++) {
      const aik = a.data[i * m + k];
      if (aik === 0) continue;
      const bRow = k * p;
      const oRow = i * p;
      for (let j = 0; j < p; j++) out.data[oRow + j] += aik * b.data[bRow + j];
    }
  }
}

// out += a @ b^T
function matmulBTAcc(a: Mat, b: Mat, out: Mat): void {
  const n = a.rows, m = a.cols, p = b.rows;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < p; j++) {
      let sum = 0;
      for (let k = 0; k < m; k++) sum += a.data[i * m + k] * b.data[j * m + k];
      out.data[i * p + j] += sum;
    }
  }
}

// out += a^T @ b
function matmulATAcc(a: Mat, b: Mat, out: Mat): void {
  const n = a.rows, m = a.cols, p = b.cols;
  for (let k = 0; k < n; k++) {
    const aRow = k * m;
    const bRow = k * p;
    for (let i = 0; i < m; i++) {
      const aki = a.data[aRow + i];
      if (aki === 0) continue;
      const oRow = i * p;
      for (let j = 0; j < p; j++) out.data[oRow + j] += aki * b.data[bRow + j];
    }
  }
}

function addBias(m: Mat, bias: Mat): void {
  for (let i = 0; i < m.rows; i++) {
    for (let j = 0; j < m.cols; j++) m.data[i * m.cols + j] += bias.data[j];
  }
}

function biasGradAcc(d: Mat, out: Mat): void {
  for (let i = 0; i < d.rows; i++) {
    for (let j = 0; j < d.cols; j++) out.data[j] += d.data[i * d.cols + j];
  }
}

function softmaxRowsInPlace(m: Mat): void {
  for (let i = 0; i < m.rows; i++) {
    const row = i * m.cols;
    let max = -Infinity;
    for (let j = 0; j < m.cols; j++) max = Math.max(max, m.data[row + j]);
    let sum = 0;
    for (let j = 0; j < m.cols; j++) {
      const e = Math.exp(m.data[row + j] - max);
      m.data[row + j] = e;
      sum += e;
    }
    for (let j = 0; j < m.cols; j++) m.data[row + j] /= sum;
  }
}

// ds = p * (dp - sum_j(dp_j * p_j)) per row, written into dp.
function softmaxRowsBackwardInPlace(p: Mat, dp: Mat): void {
  for (let i = 0; i < p.rows; i++) {
    const row = i * p.cols;
    let dot = 0;
    for (let j = 0; j < p.cols; j++) dot += dp.data[row + j] * p.data[row + j];
    for (let j = 0; j < p.cols; j++) {
      dp.data[row + j] = p.data[row + j] * (dp.data[row + j] - dot);
    }
  }
}

interface LnCache {
  out: Mat;
  xhat: Mat;
  invStd: Float64Array;
}

function layerNormForward(x: Mat, gamma: Mat, beta: Mat): LnCache {
  const n = x.rows, d = x.cols;
  const out = zerosMat(n, d);
  const xhat = zerosMat(n, d);
  const invStd = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const row = i * d;
    let mean = 0;
    for (let j = 0; j < d; j++) mean += x.data[row + j];
    mean /= d;
    let variance = 0;
    for (let j = 0; j < d; j++) {
      const delta = x.data[row + j] - mean;
      variance += delta * delta;
    }
    variance /= d;
    const inv = 1 / Math.sqrt(variance + LN_EPS);
    invStd[i] = inv;
    for (let j = 0; j < d; j++) {
      const h = (x.data[row + j] - mean) * inv;
      xhat.data[row + j] = h;
      out.data[row + j] = h * gamma.data[j] + beta.data[j];
    }
  }
  return { out, xhat, invStd };
}

function layerNormBackward(dout: Mat, cache: LnCache, gamma: Mat,
                           dgamma: Mat, dbeta: Mat): Mat {
  const n = dout.rows, d = dout.cols;
  const dx = zerosMat(n, d);
  for (let i = 0; i < n; i++) {
    const row = i * d;
    let m1 = 0;
    let m2 = 0;
    for (let j = 0; j < d; j++) {
      const dh = dout.data[row + j] * gamma.data[j];
      m1 += dh;
      m2 += dh * cache.xhat.data[row + j];
      dgamma.data[j] += dout.data[row + j] * cache.xhat.data[row + j];
      dbeta.data[j] += dout.data[row + j];
    }
    m1 /= d;
    m2 /= d;
    const inv = cache.invStd[i];
    for (let j = 0; j < d; j++) {
      const dh = dout.data[row + j] * gamma.data[j];
      dx.data[row + j] = inv * (dh - m1 - cache.xhat.data[row + j] * m2);
    }
  }
  return dx;
}

function gelu(u: number): number {
  return 0.5 * u * (1 + Math.tanh(GELU_C * (u + GELU_A * u * u * u)));
}

function geluGrad(u: number): number {
  const t = Math.tanh(GELU_C * (u + GELU_A * u * u * u));
  const dt = (1 - t * t) * GELU_C * (1 + 3 * GELU_A * u * u);
  return 0.5 * (1 + t) + 0.5 * u * dt;
}

interface LayerCache {
  xIn: Mat;
  q: Mat;
  k: Mat;
  v: Mat;
  p: Mat;
  attnOut: Mat;
  ln1: LnCache;
  u: Mat;
  h: Mat;
  ln2: LnCache;
}

interface ForwardCache {
  n: number;
  layers: LayerCache[];
  xFinal: Mat;
  probs: Mat;
}

function layerForward(layer: LayerParams, xIn: Mat, scale: number): LayerCache {
  const q = matmul(xIn, layer.wq);
  addBias(q, layer.bq);
  const k = matmul(xIn, layer.wk);
  addBias(k, layer.bk);
  const v = matmul(xIn, layer.wv);
  addBias(v, layer.bv);

  const p = zerosMat(xIn.rows, xIn.rows);
  matmulBTAcc(q, k, p);
  for (let i = 0; i < p.data.length; i++) p.data[i] *= scale;
  softmaxRowsInPlace(p);
  const attnOut = matmul(p, v);

  const y1 = matmul(attnOut, layer.wo);
  addBias(y1, layer.bo);
  for (let i = 0; i < y1.data.length; i++) y1.data[i] += xIn.data[i];
  const ln1 = layerNormForward(y1, layer.ln1Gamma, layer.ln1Beta);

  const u = matmul(ln1.out, layer.w1);
  addBias(u, layer.b1);
  const h = zerosMat(u.rows, u.cols);
  for (let i = 0; i < u.data.length; i++) h.data[i] = gelu(u.data[i]);

  const y2 = matmul(h, layer.w2);
  addBias(y2, layer.b2);
  for (let i = 0; i < y2.data.length; i++) y2.data[i] += ln1.out.data[i];
  const ln2 = layerNormForward(y2, layer.ln2Gamma, layer.ln2Beta);

  return { xIn, q, k, v, p, attnOut, ln1, u, h, ln2 };
}

function runForward(params: TaggerParams, ids: number[]): ForwardCache {
  const n = ids.length;
  const d = params.arch.hiddenSize;
  if (n > params.maxInputLength) {
    throw new RangeError(
      `sequence of ${n} subtokens exceeds the input length ${params.maxInputLength}`);
  }
  let x = zerosMat(n, d);
  for (let i = 0; i < n; i++) {
    const id = ids[i];
    if (id < 0 || id >= params.arch.vocabSize) {
      throw new RangeError(`subtoken id ${id} outside the vocabulary`);
    }
    for (let j = 0; j < d; j++) {
      x.data[i * d + j] = params.embedding.data[id * d + j] + params.positional.data[i * d + j];
    }
  }
  const scale = 1 / Math.sqrt(d);
  const layers: LayerCache[] = [];
  for (const layer of params.layers) {
    const cache = layerForward(layer, x, scale);
    layers.push(cache);
    x = cache.ln2.out;
  }
  const probs = matmul(x, params.headW);
  addBias(probs, params.headB);
  softmaxRowsInPlace(probs);
  return { n, layers, xFinal: x, probs };
}

// Class probabilities for every position; rows sum to 1.
export function forward(params: TaggerParams, ids: number[]): Float64Array {
  return runForward(params, ids).probs.data;
}

export interface LossResult {
  ceSum: number;
  tokens: number;
}

// Cross-entropy over positions with target >= 0 (bos/eos carry -1), with
// d(loss)/d(logits) scaled by gradScale and accumulated into grads. Returns
// the unscaled CE sum so callers can average over a whole batch.
export function lossAndGrad(params: TaggerParams, ids: number[], targets: number[],
                            grads: TaggerParams, gradScale: number): LossResult {
  if (targets.length !== ids.length) {
    throw new RangeError(`${targets.length} targets vs ${ids.length} ids`);
  }
  const fwd = runForward(params, ids);
  const n = fwd.n;
  const d = params.arch.hiddenSize;
  const C = NUM_CLASSES;

  let ceSum = 0;
  let tokens = 0;
  const dlogits = zerosMat(n, C);
  for (let i = 0; i < n; i++) {
    const t = targets[i];
    if (t < 0) continue;
    tokens++;
    ceSum -= Math.log(Math.max(fwd.probs.data[i * C + t], 1e-300));
    for (let c = 0; c < C; c++) {
      dlogits.data[i * C + c] = gradScale * (fwd.probs.data[i * C + c] - (c === t ? 1 : 0));
    }
  }

  matmulATAcc(fwd.xFinal, dlogits, grads.headW);
  biasGradAcc(dlogits, grads.headB);
  let dx = zerosMat(n, d);
  matmulBTAcc(dlogits, params.headW, dx);

  const scale = 1 / Math.sqrt(d);
  for (let li = params.layers.length - 1; li >= 0; li--) {
    const layer = params.layers[li];
    const g = grads.layers[li];
    const cache = fwd.layers[li];

    const dy2 = layerNormBackward(dx, cache.ln2, layer.ln2Gamma, g.ln2Gamma, g.ln2Beta);

    // y2 = ln1.out + h @ w2 + b2
    const dx1 = zerosMat(n, d);
    dx1.data.set(dy2.data);
    const dh = zerosMat(n, params.arch.ffnSize);
    matmulBTAcc(dy2, layer.w2, dh);
    matmulATAcc(cache.h, dy2, g.w2);
    biasGradAcc(dy2, g.b2);

    const du = dh;
    for (let i = 0; i < du.data.length; i++) du.data[i] *= geluGrad(cache.u.data[i]);

    matmulBTAcc(du, layer.w1, dx1);
    matmulATAcc(cache.ln1.out, du, g.w1);
    biasGradAcc(du, g.b1);

    const dy1 = layerNormBackward(dx1, cache.ln1, layer.ln1Gamma, g.ln1Gamma, g.ln1Beta);

    // y1 = xIn + attnOut @ wo + bo
    const dxIn = zerosMat(n, d);
    dxIn.data.set(dy1.data);
    const dAttnOut = zerosMat(n, d);
    matmulBTAcc(dy1, layer.wo, dAttnOut);
    matmulATAcc(cache.attnOut, dy1, g.wo);
    biasGradAcc(dy1, g.bo);

    // attnOut = p @ v
    const dp = zerosMat(n, n);
    matmulBTAcc(dAttnOut, cache.v, dp);
    const dv = zerosMat(n, d);
    matmulATAcc(cache.p, dAttnOut, dv);

    softmaxRowsBackwardInPlace(cache.p, dp);
    // s = scale * q @ k^T
    const dq = zerosMat(n, d);
    matmulAcc(dp, cache.k, dq);
    for (let i = 0; i < dq.data.length; i++) dq.data[i] *= scale;
    const dk = zerosMat(n, d);
    matmulATAcc(dp, cache.q, dk);
    for (let i = 0; i < dk.data.length; i++) dk.data[i] *= scale;

    matmulBTAcc(dq, layer.wq, dxIn);
    matmulATAcc(cache.xIn, dq, g.wq);
    biasGradAcc(dq, g.bq);
    matmulBTAcc(dk, layer.wk, dxIn);
    matmulATAcc(cache.xIn, dk, g.wk);
    biasGradAcc(dk, g.bk);
    matmulBTAcc(dv, layer.wv, dxIn);
    matmulATAcc(cache.xIn, dv, g.wv);
    biasGradAcc(dv, g.bv);

    dx = dxIn;
  }

  for (let i = 0; i < n; i++) {
    const id = ids[i];
    for (let j = 0; j < d; j++) {
      grads.embedding.data[id * d + j] += dx.data[i * d + j];
      grads.positional.data[i * d + j] += dx.data[i * d + j];
    }
  }
  return { ceSum, tokens };
}
