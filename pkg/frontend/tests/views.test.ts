import { describe, expect, it } from "vitest";

import { heatmapTable } from "../src/charts.js";
import { buildHash, parseHash, TABS } from "../src/state.js";
import type { ImportanceDoc, MetricsDoc, PdpDoc, ValidationReport } from "../src/types.js";
import {
  renderImportance,
  renderMetricsTab,
  renderPdp,
  renderValidationReport,
  renderXaiError,
} from "../src/views.js";

const METRICS_DOC: MetricsDoc = {
  reports: [
    { model_id: "ensemble", metrics: { MSE: 0.3, RMSE: 0.55 }, warnings: [] },
    { model_id: "m1", metrics: { MSE: 0.2, RMSE: 0.45 }, warnings: [] },
    { model_id: "m2", metrics: { MSE: 1.4, RMSE: 1.18 }, warnings: [] },
  ],
};

describe("metrics tab", () => {
  it("keeps service report order with the ensemble first", () => {
    const html = renderMetricsTab(METRICS_DOC, null, null);
    const ensemble = html.indexOf(">ensemble<");
    const m1 = html.indexOf(">m1<");
    const m2 = html.indexOf(">m2<");
    expect(ensemble).toBeGreaterThan(-1);
    expect(ensemble).toBeLessThan(m1);
    expect(m1).toBeLessThan(m2);
  });

  it("renders one bar chart per metric and annotation blocks", () => {
    const html = renderMetricsTab(METRICS_DOC, null, null);
    expect((html.match(/bar-chart/g) ?? []).length).toBe(2); // MSE + RMSE
    expect(html).toContain('class="annotation"');
  });
});

describe("heatmap", () => {
  it("cell hover titles carry the model pair and value", () => {
    const html = heatmapTable(["a", "b"], [[1.0, 0.5], [0.5, 1.0]], "uniformity");
    expect(html).toContain('title="a vs b: 0.5000"');
    expect(html).toContain('title="b vs b: 1"');
  });

  it("renders n/a for undefined cells", () => {
    const html = heatmapTable(["a", "b"], [[1.0, null], [null, 1.0]], "pearson");
    expect(html).toContain("n/a");
  });
});

describe("validation report rendering", () => {
  it("lists every error with its code and location", () => {
    const report: ValidationReport = {
      errors: [
        { code: "ZeroWeightSum", message: "weights sum to 0", location: "manifest.models" },
        { code: "LengthMismatch", message: "model B short", location: "models[B]" },
      ],
      warnings: [],
    };
    const html = renderValidationReport(report);
    expect(html).toContain("ZeroWeightSum");
    expect(html).toContain("models[B]");
    expect(html).toContain("Bundle rejected");
  });
});

describe("xai rendering", () => {
  const importance: ImportanceDoc = {
    model_id: "m1",
    metric: "rmse",
    baseline_score: 0.5,
    repeats: 5,
    seed: 7,
    features: {
      x1: { mean_drop: 2.0, std_drop: 0.1, repeats: 5 },
      seg: { mean_drop: 0.0, std_drop: 0.0, repeats: 5 },
    },
  };

  it("sorts importance bars by mean drop", () => {
    const html = renderImportance(importance);
    expect(html.indexOf(">x1<")).toBeLessThan(html.indexOf(">seg<"));
    expect(html).toContain("seed 7");
  });

  it("categorical pdp renders points, numeric renders a line", () => {
    const categorical: PdpDoc = {
      model_id: "m1", feature: "seg", kind: "categorical",
      grid: ["a", "b"], averages: [1.0, 2.0],
    };
    const numeric: PdpDoc = {
      model_id: "m1", feature: "x1", kind: "numeric",
      grid: [0, 1, 2], averages: [1.0, 3.0, 5.0],
    };
    expect(renderPdp(categorical)).toContain("point-chart");
    expect(renderPdp(categorical)).not.toContain("polyline");
    expect(renderPdp(numeric)).toContain("polyline");
  });

  it("renders the service's 409 explanation", () => {
    const html = renderXaiError(409, "models ['m2'] have no predictor reference");
    expect(html).toContain("409");
    expect(html).toContain("m2");
  });
});

describe("hash state", () => {
  it("round-trips every tab", () => {
    for (const tab of TABS) {
      expect(parseHash(buildHash({ tab })).tab).toBe(tab);
    }
  });

  it("falls back to metrics on junk", () => {
    expect(parseHash("#tab=nope").tab).toBe("metrics");
    expect(parseHash("").tab).toBe("metrics");
  });
});
