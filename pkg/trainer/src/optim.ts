// Adam over the unfrozen tensors. Params and grads are paired positionally
// via the paramTensors walk, which yields both structures in one order.

import { NamedTensor, paramTensors, TaggerParams } from './model.js';

interface Slot {
  theta: Float64Array;
  grad: Float64Array;
  m: Float64Array;
  v: Float64Array;
}

export class Adam {
  private readonly slots: Slot[] = [];
  private step_ = 0;

  constructor(params: TaggerParams, grads: TaggerParams, frozen: Set<string>,
              private readonly lr: number,
              private readonly beta1 = 0.9,
              private readonly beta2 = 0.999,
              private readonly eps = 1e-8) {
    const ps: NamedTensor[] = paramTensors(params);
    const gs: NamedTensor[] = paramTensors(grads);
    for (let i = 0; i < ps.length; i++) {
      if (frozen.has(ps[i].group)) continue;
      this.slots.push({
        theta: ps[i].m.data,
        grad: gs[i].m.data,
        m: new Float64Array(ps[i].m.data.length),
        v: new Float64Array(ps[i].m.data.length),
      });
    }
  }

  get trainableCount(): number {
    return this.slots.reduce((sum, s) => sum + s.theta.length, 0);
  }

  step(): void {
    this.step_++;
    const c1 = 1 - Math.pow(this.beta1, this.step_);
    const c2 = 1 - Math.pow(this.beta2, this.step_);
    for (const s of this.slots) {
      for (let i = 0; i < s.theta.length; i++) {
        const g = s.grad[i];
        s.m[i] = this.beta1 * s.m[i] + (1 - this.beta1) * g;
        s.v[i] = this.beta2 * s.v[i] + (1 - this.beta2) * g * g;
        const mhat = s.m[i] / c1;
        const vhat = s.v[i] / c2;
        s.theta[i] -= (this.lr * mhat) / (Math.sqrt(vhat) + this.eps);
      }
    }
  }
}
