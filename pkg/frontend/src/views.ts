/** HTML renderers for each tab, pure functions from service documents to
 * markup. Annotation blocks carry class "annotation" and are toggled by a
 * single switch. */

import {
  barChart,
  compareHeatmap,
  heatmapTable,
  histogram,
  lineChart,
  pointChart,
  stackedBar,
} from "./charts.js";
import { escapeHtml, fmt, fmtSigned } from "./format.js";
import type {
  BundleSummary,
  CompareDoc,
  ImportanceDoc,
  MatrixDoc,
  MetricsDoc,
  PairDetailDoc,
  PdpDoc,
  ProposalDoc,
  ValidationReport,
  WhatIfDoc,
} from "./types.js";
import { deltaDirection, SliderSpec } from "./weights.js";

export function annotation(text: string): string {
  return `<p class="annotation">${escapeHtml(text)}</p>`;
}

export function renderValidationReport(report: ValidationReport): string {
  const entry = (e: { code: string; message: string; location: string }) =>
    `<li><code>${escapeHtml(e.code)}</code> at <code>${escapeHtml(e.location)}</code>: ` +
    `${escapeHtml(e.message)}</li>`;
  return `<div class="validation-report">` +
    `<h3>Bundle rejected</h3><ul class="errors">${report.errors.map(entry).join("")}</ul>` +
    (report.warnings.length ? `<ul class="warnings">${report.warnings.map(entry).join("")}</ul>` : "") +
    `</div>`;
}

export function renderSummary(summary: BundleSummary): string {
  const models = summary.models
    .map((m) => `<li>${escapeHtml(m.id)} (${escapeHtml(m.name)}), weight ${fmt(m.weight)}` +
      `${m.has_probabilities ? "" : ", no probabilities"}` +
      `${m.has_predictor ? "" : ", no predictor"}</li>`)
    .join("");
  return `<div class="summary"><p><strong>${summary.task}</strong> bundle: ` +
    `${summary.n} observations, ${summary.m} component models.</p><ul>${models}</ul></div>`;
}

// -- metrics tab -------------------------------------------------------------

export function renderMetricsTab(doc: MetricsDoc, correlation: MatrixDoc | null,
                                 compare: CompareDoc | null): string {
  if (!doc.reports.length) return "<p>No metric reports.</p>";
  const names = Object.keys(doc.reports[0].metrics);
  const labels = doc.reports.map((r) => r.model_id);
  const charts = names
    .map((name) => barChart(labels, doc.reports.map((r) => r.metrics[name]),
                            { title: name, highlightFirst: labels[0] === "ensemble" }))
    .join("");
  const note = annotation(
    "Bars compare each evaluation metric across the ensemble (first bar) and " +
    "its component models. The matrix below shows how strongly each pair of " +
    "prediction vectors agrees, and the compare strip shows every single " +
    "observation against the true target.");
  const corr = correlation
    ? `<h3>Prediction ${correlation.metric === "kappa" ? "agreement (kappa)" : `correlation (${correlation.metric})`}</h3>` +
      heatmapTable(correlation.ids, correlation.values, correlation.metric)
    : "";
  let cmp = "";
  if (compare) {
    if (compare.task === "regression" && compare.raw) {
      const matrix = compare.scaled ?? compare.raw;
      cmp = `<h3>Prediction compare matrix</h3>` +
        annotation("Cell color encodes the difference between predicted and true value " +
          "(scaled by the target's standard deviation when available).") +
        compareHeatmap(compare.ids, matrix, true);
    } else if (compare.correct) {
      cmp = `<h3>Prediction compare matrix</h3>` +
        annotation("Red cells mark misclassified observations per model.") +
        compareHeatmap(compare.ids, compare.correct, false);
    }
  }
  return `<section class="tab-metrics">${note}<div class="chart-grid">${charts}</div>${corr}${cmp}</section>`;
}

// -- compatimetrics tab --------------------------------------------------------

export function renderCompatMatrix(doc: MatrixDoc): string {
  return `<h3>${escapeHtml(doc.metric)}</h3>` + heatmapTable(doc.ids, doc.values, doc.metric);
}

export function renderPairDetail(doc: PairDetailDoc): string {
  const cards = Object.entries(doc.metrics)
    .map(([name, value]) => `<div class="card"><span class="card-name">${escapeHtml(name)}</span>` +
      `<span class="card-value">${fmt(value)}</span></div>`)
    .join("");
  let extras = "";
  if (doc.abs_diff_histogram) {
    extras += histogram(doc.abs_diff_histogram.edges, doc.abs_diff_histogram.counts);
  }
  if (doc.correctness_levels) {
    const cl = doc.correctness_levels;
    extras += `<h4>Correctness levels</h4>` + stackedBar([
      { label: "both correct", value: cl.both_correct, color: "#16a34a" },
      { label: "exactly one correct", value: cl.exactly_one_correct, color: "#d97706" },
      { label: "none correct", value: cl.none_correct, color: "#dc2626" },
    ]);
  }
  if (doc.disagreement_by_class) {
    const entries = Object.entries(doc.disagreement_by_class);
    extras += `<h4>Disagreement by class</h4>` +
      barChart(entries.map(([c]) => c), entries.map(([, v]) => v));
  }
  if (doc.acs_cumulative && doc.acs_cumulative.length) {
    extras += `<h4>Cumulative collective score</h4>` +
      lineChart(doc.acs_cumulative.map((_, i) => i + 1), doc.acs_cumulative,
                { title: "average collective score over the dataset" });
  }
  if (doc.eight_cell) {
    const cells = Object.entries(doc.eight_cell)
      .map(([k, v]) => `<tr><td>${escapeHtml(k)}</td><td>${v}</td></tr>`)
      .join("");
    extras += `<h4>Two-model confusion</h4><table class="eight-cell">${cells}</table>`;
  }
  return `<section class="pair-detail"><h3>${escapeHtml(doc.a)} vs ${escapeHtml(doc.b)}</h3>` +
    `<div class="cards">${cards}</div>${extras}</section>`;
}

// -- weights tab ---------------------------------------------------------------

export function renderSliders(sliders: SliderSpec[],
                              normalized: Record<string, number> | null): string {
  return sliders
    .map((s) => {
      const share = normalized ? ` <span class="norm">(${fmt(normalized[s.id], 3)} normalized)</span>` : "";
      return `<label class="slider-row" data-model="${escapeHtml(s.id)}">` +
        `<span class="slider-name">${escapeHtml(s.id)}${share}</span>` +
        `<input type="range" min="${s.min}" max="${s.max}" step="${s.step}" ` +
        `value="${s.value}" data-model="${escapeHtml(s.id)}">` +
        `<span class="slider-value">${fmt(s.value, 2)}</span></label>`;
    })
    .join("");
}

export function renderWhatIfTable(doc: WhatIfDoc): string {
  const names = Object.keys(doc.candidate.metrics);
  const rows = names
    .map((name) => {
      const delta = doc.delta[name];
      const direction = deltaDirection(name, delta ?? null);
      return `<tr><td>${escapeHtml(name)}</td>` +
        `<td>${fmt(doc.baseline.metrics[name])}</td>` +
        `<td>${fmt(doc.candidate.metrics[name])}</td>` +
        `<td class="delta ${direction}" data-metric="${escapeHtml(name)}">${fmtSigned(delta)}</td></tr>`;
    })
    .join("");
  const holdout = doc.holdout
    ? `<p class="holdout-note">Holdout deltas: ${Object.entries(doc.holdout.delta)
        .map(([k, v]) => `${escapeHtml(k)} ${fmtSigned(v)}`)
        .join(", ")}</p>`
    : "";
  return `<table class="whatif"><tr><th>metric</th><th>original</th><th>candidate</th>` +
    `<th>delta</th></tr>${rows}</table>` +
    `<p class="active-count">${doc.active_model_count} model(s) active</p>${holdout}`;
}

export function renderProposal(doc: ProposalDoc): string {
  const weights = Object.entries(doc.weights)
    .map(([id, w]) => `<li>${escapeHtml(id)}: ${fmt(w, 3)}</li>`)
    .join("");
  return `<div class="proposal"><p>Suggested weights reach ` +
    `${escapeHtml(doc.objective)} ${fmt(doc.objective_value)} ` +
    `(baseline ${fmt(doc.baseline_value)}) after ${doc.evaluations_used} evaluations.</p>` +
    `<ul>${weights}</ul></div>`;
}

export function renderWeightsDisabled(reason: string): string {
  return `<section class="tab-disabled"><h3>Weights analysis unavailable</h3>` +
    `<p>${escapeHtml(reason)}</p></section>`;
}

// -- xai tab ---------------------------------------------------------------------

export function renderImportance(doc: ImportanceDoc): string {
  const entries = Object.entries(doc.features);
  entries.sort((a, b) => b[1].mean_drop - a[1].mean_drop);
  const chart = barChart(entries.map(([name]) => name),
                         entries.map(([, f]) => f.mean_drop),
                         { title: `permutation importance (${doc.metric})` });
  const note = annotation(
    "Each bar is the mean drop in the score after shuffling one feature, " +
    `over ${doc.repeats} repeats with seed ${doc.seed}; larger means more influential.`);
  return `<div class="importance" data-model="${escapeHtml(doc.model_id)}">${note}${chart}</div>`;
}

export function renderPdp(doc: PdpDoc): string {
  const title = `partial dependence of ${doc.feature} (${doc.model_id})`;
  if (doc.kind === "categorical") {
    const ys = (doc.averages as number[][] | number[]).map((v) =>
      Array.isArray(v) ? v[v.length - 1] : v);
    return pointChart(doc.grid.map(String), ys, { title });
  }
  const ys = (doc.averages as number[][] | number[]).map((v) =>
    Array.isArray(v) ? v[v.length - 1] : v);
  return lineChart(doc.grid.map(Number), ys, { title });
}

export function renderXaiError(status: number, message: string): string {
  return `<div class="xai-error"><p>Explanation unavailable (HTTP ${status}): ` +
    `${escapeHtml(message)}</p></div>`;
}
