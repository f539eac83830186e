/** Interactive weights-tab loop: sliders mutate a candidate weight vector,
 * a debounced evaluate call fetches the what-if report, and only the newest
 * response is ever rendered. DOM-free so the loop is fully testable.
 *
 * Sliders range over 0..2x the original weight in steps of 0.01; the server
 * normalizes, so raw positions are sent as-is.
 */

import { Debouncer, Timers } from "./debounce.js";
import type { WhatIfDoc } from "./types.js";

export const SLIDER_STEP = 0.01;
export const SLIDER_MAX_FACTOR = 2;
export const DEBOUNCE_MS = 200;

export interface SliderSpec {
  id: string;
  min: number;
  max: number;
  step: number;
  value: number;
}

export type EvaluateFn = (
  weights: Record<string, number>,
  holdoutBundleId?: string,
) => Promise<WhatIfDoc>;

export interface WeightsViewState {
  weights: Record<string, number>;
  normalized: Record<string, number> | null;
  activeModelCount: number | null;
  report: WhatIfDoc | null;
  error: string | null;
  evaluating: boolean;
}

export class WeightsController {
  readonly original: Record<string, number>;
  private raw: Record<string, number>;
  private debouncer: Debouncer;
  private seq = 0;
  private inFlight = false;
  private dirtyWhileInFlight = false;
  private state: WeightsViewState;
  holdoutBundleId?: string;
  onChange: (state: WeightsViewState) => void = () => {};

  constructor(models: { id: string; weight: number }[],
              private evaluate: EvaluateFn,
              opts: { debounceMs?: number; timers?: Timers } = {}) {
    this.original = Object.fromEntries(models.map((m) => [m.id, m.weight]));
    this.raw = { ...this.original };
    this.debouncer = new Debouncer(opts.debounceMs ?? DEBOUNCE_MS, opts.timers);
    this.state = {
      weights: { ...this.raw },
      normalized: null,
      activeModelCount: null,
      report: null,
      error: null,
      evaluating: false,
    };
  }

  get view(): WeightsViewState {
    return this.state;
  }

  sliders(): SliderSpec[] {
    return Object.entries(this.original).map(([id, weight]) => ({
      id,
      min: 0,
      // zero-weight originals still get a usable range
      max: weight > 0 ? weight * SLIDER_MAX_FACTOR : 1,
      step: SLIDER_STEP,
      value: this.raw[id],
    }));
  }

  setWeight(id: string, value: number): void {
    if (!(id in this.raw)) throw new Error(`unknown model id ${id}`);
    this.raw[id] = value;
    this.emit({ ...this.state, weights: { ...this.raw } });
    this.debouncer.schedule(() => void this.issue());
  }

  /** Restore the original weighting (debounced like any slider move). */
  reset(): void {
    this.raw = { ...this.original };
    this.emit({ ...this.state, weights: { ...this.raw } });
    this.debouncer.schedule(() => void this.issue());
  }

  /** Evaluate immediately (initial render, holdout change). */
  refresh(): Promise<void> {
    this.debouncer.cancel();
    return this.issue();
  }

  private emit(next: WeightsViewState): void {
    this.state = next;
    this.onChange(this.state);
  }

  private async issue(): Promise<void> {
    if (this.inFlight) {
      // at most one in-flight request; rerun when the current one settles
      this.dirtyWhileInFlight = true;
      return;
    }
    const ticket = ++this.seq;
    this.inFlight = true;
    this.emit({ ...this.state, evaluating: true });
    let next: WeightsViewState;
    try {
      const report = await this.evaluate({ ...this.raw }, this.holdoutBundleId);
      next = {
        weights: { ...this.raw },
        normalized: report.weights.normalized,
        activeModelCount: report.active_model_count,
        report,
        error: null,
        evaluating: false,
      };
    } catch (err) {
      next = { ...this.state, evaluating: false, error: String(err) };
    }
    this.inFlight = false;
    if (this.dirtyWhileInFlight) {
      // a newer slider position superseded this response: never render it
      this.dirtyWhileInFlight = false;
      void this.issue();
      return;
    }
    if (ticket === this.seq) this.emit(next);
  }
}

/** Delta classification used for the color-coded what-if table. */
export function deltaDirection(metric: string, delta: number | null): "better" | "worse" | "flat" {
  if (delta === null || delta === 0) return "flat";
  const lowerIsBetter = new Set(["MSE", "RMSE", "MAE", "MAPE"]);
  const improved = lowerIsBetter.has(metric) ? delta < 0 : delta > 0;
  return improved ? "better" : "worse";
}
