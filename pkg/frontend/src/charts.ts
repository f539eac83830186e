/** Small SVG/HTML chart builders returning markup strings: bar charts,
 * heatmap tables, line/point charts, stacked bars, histograms. Pure
 * functions over service documents so tests can assert on the markup. */

import { escapeHtml, fmt, heatColor } from "./format.js";

const W = 420;
const H = 180;
const PAD = 28;

function scale(values: number[]): { lo: number; hi: number } {
  const finite = values.filter((v) => isFinite(v));
  if (!finite.length) return { lo: 0, hi: 1 };
  let lo = Math.min(0, ...finite);
  let hi = Math.max(0, ...finite);
  if (lo === hi) hi = lo + 1;
  return { lo, hi };
}

export function barChart(labels: string[], values: (number | null)[],
                         opts: { title?: string; highlightFirst?: boolean } = {}): string {
  const nums = values.map((v) => (v === null ? 0 : v));
  const { lo, hi } = scale(nums);
  const innerW = W - 2 * PAD;
  const innerH = H - 2 * PAD;
  const slot = innerW / Math.max(1, labels.length);
  const barW = slot * 0.7;
  const yOf = (v: number) => PAD + innerH - ((v - lo) / (hi - lo)) * innerH;
  const zeroY = yOf(0);
  const bars = labels
    .map((label, i) => {
      const v = nums[i];
      const x = PAD + i * slot + (slot - barW) / 2;
      const y = Math.min(yOf(v), zeroY);
      const height = Math.abs(zeroY - yOf(v));
      const fill = opts.highlightFirst && i === 0 ? "#d97706" : "#2563eb";
      const title = `${escapeHtml(label)}: ${values[i] === null ? "n/a" : fmt(values[i])}`;
      return `<g><title>${title}</title>` +
        `<rect x="${x.toFixed(1)}" y="${y.toFixed(1)}" width="${barW.toFixed(1)}" ` +
        `height="${Math.max(height, 0.5).toFixed(1)}" fill="${fill}"/>` +
        `<text x="${(x + barW / 2).toFixed(1)}" y="${H - 8}" text-anchor="middle" ` +
        `class="tick">${escapeHtml(label)}</text></g>`;
    })
    .join("");
  const title = opts.title ? `<text x="${W / 2}" y="14" text-anchor="middle" class="title">${escapeHtml(opts.title)}</text>` : "";
  return `<svg viewBox="0 0 ${W} ${H}" class="chart bar-chart" role="img">${title}` +
    `<line x1="${PAD}" y1="${zeroY.toFixed(1)}" x2="${W - PAD}" y2="${zeroY.toFixed(1)}" class="axis"/>${bars}</svg>`;
}

/** Heatmap as an HTML table; every cell's hover title carries (pair, value). */
export function heatmapTable(ids: string[], values: (number | null)[][],
                             metric: string): string {
  const flat = values.flat().filter((v): v is number => v !== null && isFinite(v));
  const lo = flat.length ? Math.min(...flat) : 0;
  const hi = flat.length ? Math.max(...flat) : 1;
  const head = `<tr><th></th>${ids.map((id) => `<th>${escapeHtml(id)}</th>`).join("")}</tr>`;
  const rows = ids
    .map((rowId, i) => {
      const cells = ids
        .map((colId, j) => {
          const v = values[i][j];
          const title = `${escapeHtml(rowId)} vs ${escapeHtml(colId)}: ${v === null ? "n/a" : fmt(v)}`;
          return `<td style="background:${heatColor(v, lo, hi)}" title="${title}">` +
            `${v === null ? "n/a" : fmt(v, 3)}</td>`;
        })
        .join("");
      return `<tr><th>${escapeHtml(rowId)}</th>${cells}</tr>`;
    })
    .join("");
  return `<table class="heatmap" data-metric="${escapeHtml(metric)}">${head}${rows}</table>`;
}

/** Wide observation heatmap for the prediction-compare matrix. */
export function compareHeatmap(ids: string[], rows: number[][] | boolean[][],
                               numeric: boolean): string {
  const n = rows.length ? rows[0].length : 0;
  const cellW = Math.max(1, Math.min(6, Math.floor(900 / Math.max(1, n))));
  const cellH = 16;
  let lo = 0;
  let hi = 1;
  if (numeric) {
    const flat = (rows as number[][]).flat().map(Math.abs);
    hi = flat.length ? Math.max(...flat, 1e-9) : 1;
    lo = -hi;
  }
  const body = rows
    .map((row, i) => {
      const cells = (row as (number | boolean)[])
        .map((v, j) => {
          const color = numeric
            ? heatColor(v as number, lo, hi)
            : v
              ? "#dbeafe"
              : "#dc2626";
          const label = numeric ? fmt(v as number, 3) : v ? "correct" : "wrong";
          return `<rect x="${j * cellW}" y="${i * (cellH + 2)}" width="${cellW}" height="${cellH}" ` +
            `fill="${color}"><title>${escapeHtml(ids[i])} obs ${j}: ${label}</title></rect>`;
        })
        .join("");
      return `<g>${cells}<text x="${n * cellW + 6}" y="${i * (cellH + 2) + 12}" class="tick">` +
        `${escapeHtml(ids[i])}</text></g>`;
    })
    .join("");
  const width = n * cellW + 90;
  const height = rows.length * (cellH + 2);
  return `<svg viewBox="0 0 ${width} ${height}" class="chart compare-heatmap" role="img">${body}</svg>`;
}

export function lineChart(xs: number[], ys: number[], opts: { title?: string } = {}): string {
  if (!xs.length) return `<svg viewBox="0 0 ${W} ${H}" class="chart line-chart"></svg>`;
  const { lo, hi } = scale(ys);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const xOf = (x: number) => PAD + ((x - xLo) / (xHi - xLo || 1)) * (W - 2 * PAD);
  const yOf = (v: number) => PAD + (H - 2 * PAD) - ((v - lo) / (hi - lo)) * (H - 2 * PAD);
  const points = xs.map((x, i) => `${xOf(x).toFixed(1)},${yOf(ys[i]).toFixed(1)}`).join(" ");
  const title = opts.title ? `<text x="${W / 2}" y="14" text-anchor="middle" class="title">${escapeHtml(opts.title)}</text>` : "";
  return `<svg viewBox="0 0 ${W} ${H}" class="chart line-chart" role="img">${title}` +
    `<polyline points="${points}" fill="none" stroke="#2563eb" stroke-width="1.5"/></svg>`;
}

/** Categorical PDP renders points, not a connecting line. */
export function pointChart(labels: string[], ys: number[], opts: { title?: string } = {}): string {
  const { lo, hi } = scale(ys);
  const slot = (W - 2 * PAD) / Math.max(1, labels.length);
  const yOf = (v: number) => PAD + (H - 2 * PAD) - ((v - lo) / (hi - lo)) * (H - 2 * PAD);
  const points = labels
    .map((label, i) => {
      const cx = PAD + slot * (i + 0.5);
      return `<circle cx="${cx.toFixed(1)}" cy="${yOf(ys[i]).toFixed(1)}" r="4" fill="#2563eb">` +
        `<title>${escapeHtml(label)}: ${fmt(ys[i])}</title></circle>` +
        `<text x="${cx.toFixed(1)}" y="${H - 8}" text-anchor="middle" class="tick">${escapeHtml(label)}</text>`;
    })
    .join("");
  const title = opts.title ? `<text x="${W / 2}" y="14" text-anchor="middle" class="title">${escapeHtml(opts.title)}</text>` : "";
  return `<svg viewBox="0 0 ${W} ${H}" class="chart point-chart" role="img">${title}${points}</svg>`;
}

export function stackedBar(segments: { label: string; value: number; color: string }[]): string {
  const total = segments.reduce((acc, s) => acc + s.value, 0) || 1;
  let x = 0;
  const parts = segments
    .map((s) => {
      const width = (s.value / total) * W;
      const rect = `<rect x="${x.toFixed(1)}" y="0" width="${width.toFixed(1)}" height="28" fill="${s.color}">` +
        `<title>${escapeHtml(s.label)}: ${fmt(s.value)}</title></rect>`;
      x += width;
      return rect;
    })
    .join("");
  return `<svg viewBox="0 0 ${W} 28" class="chart stacked-bar" role="img">${parts}</svg>`;
}

export function histogram(edges: number[], counts: number[]): string {
  const labels = counts.map((_, i) => `[${fmt(edges[i], 2)}, ${fmt(edges[i + 1], 2)}]`);
  return barChart(labels, counts, { title: "absolute prediction differences" });
}
