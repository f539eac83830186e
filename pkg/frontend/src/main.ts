/** Browser bootstrap: upload panel, tab bar, and per-tab wiring against the
 * analysis service. All computation happens server-side; this file only
 * routes documents into the renderers. */

import { ApiClient, ApiError } from "./api.js";
import { buildHash, parseHash, Tab, TABS, tabAvailability } from "./state.js";
import type { BundleSummary, MatrixDoc, ValidationReport } from "./types.js";
import {
  annotation,
  renderCompatMatrix,
  renderImportance,
  renderMetricsTab,
  renderPairDetail,
  renderPdp,
  renderProposal,
  renderSliders,
  renderSummary,
  renderValidationReport,
  renderWeightsDisabled,
  renderWhatIfTable,
  renderXaiError,
} from "./views.js";
import { WeightsController } from "./weights.js";

const $ = <T extends HTMLElement>(sel: string): T => {
  const el = document.querySelector<T>(sel);
  if (!el) throw new Error(`missing element ${sel}`);
  return el;
};

interface AppState {
  api: ApiClient;
  bundleId: string | null;
  summary: BundleSummary | null;
  weights: WeightsController | null;
  bundles: { id: string; label: string }[];
}

const storedUrl =
  typeof localStorage !== "undefined" ? localStorage.getItem("serviceUrl") : null;

const state: AppState = {
  api: new ApiClient(storedUrl ?? "http://127.0.0.1:8080"),
  bundleId: null,
  summary: null,
  weights: null,
  bundles: [],
};

function setActiveTab(tab: Tab): void {
  window.location.hash = buildHash({ tab });
  for (const t of TABS) {
    $(`#tab-button-${t}`).classList.toggle("active", t === tab);
    $(`#tab-${t}`).classList.toggle("hidden", t !== tab);
  }
}

function renderTabs(): void {
  if (!state.summary) return;
  const availability = tabAvailability(state.summary.analyses);
  for (const t of TABS) {
    const button = $(`#tab-button-${t}`) as HTMLButtonElement;
    button.disabled = !availability[t].enabled;
    button.title = availability[t].reason ?? "";
  }
  if (!availability.weights.enabled) {
    $("#tab-weights").innerHTML = renderWeightsDisabled(availability.weights.reason ?? "");
  }
}

async function loadMetricsTab(): Promise<void> {
  if (!state.bundleId || !state.summary) return;
  const method = state.summary.task === "regression"
    ? ($("#correlation-method") as HTMLSelectElement).value
    : "kappa";
  const [metrics, correlation, compare] = await Promise.all([
    state.api.metrics(state.bundleId),
    state.api.correlation(state.bundleId, method).catch(() => null as MatrixDoc | null),
    state.api.compare(state.bundleId),
  ]);
  $("#metrics-content").innerHTML = renderMetricsTab(metrics, correlation, compare);
}

async function loadCompatTab(): Promise<void> {
  if (!state.bundleId || !state.summary) return;
  const metric = ($("#compat-metric") as HTMLSelectElement).value;
  const doc = await state.api.compatMatrix(state.bundleId, metric);
  $("#compat-matrix").innerHTML = renderCompatMatrix(doc);
  const a = ($("#pair-a") as HTMLSelectElement).value;
  const b = ($("#pair-b") as HTMLSelectElement).value;
  if (a && b) {
    const detail = await state.api.pairDetail(state.bundleId, a, b);
    $("#pair-detail").innerHTML = renderPairDetail(detail);
  }
}

function wireWeightsTab(): void {
  if (!state.bundleId || !state.summary) return;
  const availability = tabAvailability(state.summary.analyses);
  if (!availability.weights.enabled) return;
  const bundleId = state.bundleId;
  const controller = new WeightsController(
    state.summary.models.map((m) => ({ id: m.id, weight: m.weight })),
    (weights, holdout) => state.api.weightsEvaluate(bundleId, weights, holdout),
  );
  state.weights = controller;
  const slidersHost = $("#weight-sliders");
  controller.onChange = (view) => {
    slidersHost.innerHTML = renderSliders(controller.sliders(), view.normalized);
    wireSliderInputs();
    $("#whatif-table").innerHTML = view.report
      ? renderWhatIfTable(view.report)
      : view.error
        ? `<p class="error">${view.error}</p>`
        : "<p>evaluating...</p>";
  };

  function wireSliderInputs(): void {
    slidersHost.querySelectorAll<HTMLInputElement>("input[type=range]").forEach((input) => {
      input.addEventListener("input", () => {
        controller.setWeight(input.dataset.model ?? "", Number(input.value));
      });
    });
  }

  $("#weights-reset").onclick = () => controller.reset();
  $("#weights-suggest").onclick = async () => {
    const objective = ($("#suggest-objective") as HTMLInputElement).value || "rmse";
    const budget = Number(($("#suggest-budget") as HTMLInputElement).value || "500");
    const seed = Number(($("#suggest-seed") as HTMLInputElement).value || "7");
    const proposal = await state.api.weightsSuggest(bundleId, objective, budget, seed);
    $("#suggest-result").innerHTML = renderProposal(proposal);
    for (const [id, w] of Object.entries(proposal.weights)) controller.setWeight(id, w);
  };
  const holdoutSelect = $("#holdout-select") as HTMLSelectElement;
  holdoutSelect.innerHTML = `<option value="">no holdout</option>` + state.bundles
    .filter((b) => b.id !== bundleId)
    .map((b) => `<option value="${b.id}">${b.label}</option>`)
    .join("");
  holdoutSelect.onchange = () => {
    controller.holdoutBundleId = holdoutSelect.value || undefined;
    void controller.refresh();
  };
  void controller.refresh();
}

async function loadXaiTab(): Promise<void> {
  if (!state.bundleId || !state.summary) return;
  const model = ($("#xai-model") as HTMLSelectElement).value;
  const repeats = Number(($("#xai-repeats") as HTMLInputElement).value || "5");
  const seed = Number(($("#xai-seed") as HTMLInputElement).value || "0");
  const feature = ($("#xai-feature") as HTMLSelectElement).value;
  const grid = Number(($("#xai-grid") as HTMLInputElement).value || "20");
  try {
    const importance = await state.api.importance(state.bundleId, model, repeats, seed);
    $("#xai-importance").innerHTML = renderImportance(importance);
    if (feature) {
      const pdp = await state.api.pdp(state.bundleId, model, feature, grid);
      $("#xai-pdp").innerHTML = renderPdp(pdp);
    }
  } catch (err) {
    if (err instanceof ApiError) {
      $("#xai-importance").innerHTML = renderXaiError(err.status, err.message);
      $("#xai-pdp").innerHTML = "";
    } else {
      throw err;
    }
  }
}

function populateSelectors(): void {
  if (!state.summary) return;
  const summary = state.summary;
  const modelOptions = summary.models.map((m) => `<option>${m.id}</option>`).join("");
  $("#pair-a").innerHTML = modelOptions;
  $("#pair-b").innerHTML = modelOptions;
  ($("#pair-b") as HTMLSelectElement).selectedIndex = Math.min(1, summary.models.length - 1);
  $("#compat-metric").innerHTML = summary.compat_metrics
    .map((m) => `<option>${m}</option>`)
    .join("");
  $("#xai-model").innerHTML =
    `<option value="ensemble">ensemble</option>` +
    summary.models.filter((m) => m.has_predictor).map((m) => `<option>${m.id}</option>`).join("");
  $("#xai-feature").innerHTML = summary.features
    .map((f) => `<option>${f.name}</option>`)
    .join("");
  const corr = $("#correlation-method") as HTMLSelectElement;
  corr.innerHTML = summary.task === "regression"
    ? "<option>pearson</option><option>spearman</option>"
    : "<option>kappa</option>";
}

async function onUpload(): Promise<void> {
  const fileInput = $("#bundle-file") as HTMLInputElement;
  const pathInput = $("#bundle-path") as HTMLInputElement;
  const status = $("#upload-status");
  try {
    let created;
    if (fileInput.files && fileInput.files.length) {
      const text = await fileInput.files[0].text();
      created = await state.api.createBundle({ bundle: JSON.parse(text) });
    } else if (pathInput.value) {
      created = await state.api.createBundle({ path: pathInput.value });
    } else {
      status.innerHTML = annotation("Choose a single-file bundle or enter a server-side path.");
      return;
    }
    state.bundleId = created.bundle_id;
    state.summary = created.summary;
    state.bundles.push({ id: created.bundle_id, label: `${created.summary.task} (${created.bundle_id.slice(0, 8)})` });
    status.innerHTML = renderSummary(created.summary);
    populateSelectors();
    renderTabs();
    setActiveTab(parseHash(window.location.hash).tab);
    await loadMetricsTab();
    await loadCompatTab();
    wireWeightsTab();
    await loadXaiTab();
  } catch (err) {
    if (err instanceof ApiError && err.status === 400 && err.body) {
      status.innerHTML = renderValidationReport(err.body as ValidationReport);
    } else {
      status.innerHTML = `<p class="error">${String(err)}</p>`;
    }
  }
}

export function bootstrap(): void {
  $("#upload-button").onclick = () => void onUpload();
  for (const t of TABS) {
    $(`#tab-button-${t}`).addEventListener("click", () => setActiveTab(t));
  }
  $("#correlation-method").addEventListener("change", () => void loadMetricsTab());
  $("#compat-metric").addEventListener("change", () => void loadCompatTab());
  $("#pair-a").addEventListener("change", () => void loadCompatTab());
  $("#pair-b").addEventListener("change", () => void loadCompatTab());
  for (const id of ["#xai-model", "#xai-feature"]) {
    $(id).addEventListener("change", () => void loadXaiTab());
  }
  for (const id of ["#xai-repeats", "#xai-seed", "#xai-grid"]) {
    $(id).addEventListener("change", () => void loadXaiTab());
  }
  $("#annotations-toggle").addEventListener("change", (event) => {
    const on = (event.target as HTMLInputElement).checked;
    document.body.classList.toggle("annotations-off", !on);
  });
  window.addEventListener("hashchange", () => setActiveTab(parseHash(window.location.hash).tab));
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  bootstrap();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", bootstrap);
}
