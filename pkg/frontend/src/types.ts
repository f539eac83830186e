/** Shapes of the analysis-service JSON documents the dashboard consumes.
 * The UI performs no numeric computation beyond display rounding: every
 * number shown traces back to one of these fields. */

export type Task = "regression" | "binary" | "multiclass";

export interface ModelSummary {
  id: string;
  name: string;
  weight: number;
  has_probabilities: boolean;
  has_predictor: boolean;
}

export interface BundleSummary {
  task: Task;
  n: number;
  m: number;
  target_column: string;
  features: { name: string; kind: "numeric" | "categorical"; levels?: string[] }[];
  models: ModelSummary[];
  analyses: { metrics: boolean; compatimetrics: boolean; weights_lab: boolean; xai: boolean };
  compat_metrics: string[];
  class_labels?: string[];
  positive_label?: string;
  target_std?: number;
}

export interface CreatedBundle {
  bundle_id: string;
  summary: BundleSummary;
}

export interface ValidationEntry {
  code: string;
  message: string;
  location: string;
}

export interface ValidationReport {
  errors: ValidationEntry[];
  warnings: ValidationEntry[];
}

export interface MetricReport {
  model_id: string;
  metrics: Record<string, number | null>;
  warnings: string[];
}

export interface MetricsDoc {
  reports: MetricReport[];
}

export interface MatrixDoc {
  metric: string;
  ids: string[];
  values: (number | null)[][];
  symmetric?: boolean;
  label?: string;
}

export interface CompareDoc {
  task: Task;
  ids: string[];
  y: (number | string)[];
  raw?: number[][];
  scaled?: number[][] | null;
  labels?: string[][];
  correct?: boolean[][];
}

export interface PairDetailDoc {
  a: string;
  b: string;
  task: Task;
  metrics: Record<string, number>;
  sd_threshold?: number;
  xi?: number;
  abs_diff_histogram?: { edges: number[]; counts: number[] };
  correctness_levels?: { both_correct: number; exactly_one_correct: number; none_correct: number };
  disagreement_by_class?: Record<string, number>;
  acs_cumulative?: number[];
  eight_cell?: Record<string, number>;
}

export interface WhatIfDoc {
  weights: { raw: Record<string, number>; normalized: Record<string, number> };
  active_model_count: number;
  candidate: MetricReport;
  baseline: MetricReport;
  delta: Record<string, number | null>;
  holdout?: { candidate: MetricReport; baseline: MetricReport; delta: Record<string, number | null> };
}

export interface ProposalDoc {
  weights: Record<string, number>;
  objective: string;
  direction: "min" | "max";
  objective_value: number;
  baseline_value: number;
  evaluations_used: number;
  trajectory: [number, number][];
}

export interface ImportanceDoc {
  model_id: string;
  metric: string;
  baseline_score: number;
  repeats: number;
  seed: number;
  features: Record<string, { mean_drop: number; std_drop: number; repeats: number }>;
}

export interface PdpDoc {
  model_id: string;
  feature: string;
  kind: "numeric" | "categorical";
  grid: (number | string)[];
  averages: number[] | number[][];
  class_labels?: string[];
}

export interface ErrorDoc {
  error: { code: string; message: string };
}
