/** Thin client over the analysis-service routes. Injectable fetch keeps it
 * testable without a network. */

import type {
  BundleSummary,
  CompareDoc,
  CreatedBundle,
  ImportanceDoc,
  MatrixDoc,
  MetricsDoc,
  PairDetailDoc,
  PdpDoc,
  ProposalDoc,
  WhatIfDoc,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string,
              public body: unknown) {
    super(message);
  }
}

async function parse<T>(resp: Response): Promise<T> {
  const body = await resp.json().catch(() => null);
  if (!resp.ok) {
    const err = (body as { error?: { code?: string; message?: string } } | null)?.error;
    throw new ApiError(resp.status, err?.code ?? "HttpError",
                       err?.message ?? `HTTP ${resp.status}`, body);
  }
  return body as T;
}

export class ApiClient {
  constructor(private baseUrl: string, private fetchFn: FetchLike = fetch.bind(globalThis)) {}

  private url(path: string, params?: Record<string, string | number | undefined>): string {
    const query = params
      ? Object.entries(params)
          .filter(([, v]) => v !== undefined)
          .map(([k, v]) => `${encodeURIComponent(k)}=${encodeURIComponent(String(v))}`)
          .join("&")
      : "";
    return `${this.baseUrl}${path}${query ? `?${query}` : ""}`;
  }

  private get<T>(path: string, params?: Record<string, string | number | undefined>): Promise<T> {
    return this.fetchFn(this.url(path, params)).then((r) => parse<T>(r));
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.fetchFn(this.url(path), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    }).then((r) => parse<T>(r));
  }

  health(): Promise<{ status: string }> {
    return this.get("/api/health");
  }

  /** Upload a single-file bundle document, or register a server-side path. */
  createBundle(payload: { bundle?: unknown; path?: string }): Promise<CreatedBundle> {
    return this.post("/api/bundles", payload);
  }

  summary(bundleId: string): Promise<BundleSummary> {
    return this.get(`/api/bundles/${bundleId}/summary`);
  }

  metrics(bundleId: string): Promise<MetricsDoc> {
    return this.get(`/api/bundles/${bundleId}/metrics`);
  }

  compare(bundleId: string): Promise<CompareDoc> {
    return this.get(`/api/bundles/${bundleId}/compare`);
  }

  correlation(bundleId: string, method: string): Promise<MatrixDoc> {
    return this.get(`/api/bundles/${bundleId}/correlation`, { method });
  }

  compatMatrix(bundleId: string, metric: string): Promise<MatrixDoc> {
    return this.get(`/api/bundles/${bundleId}/compat`, { metric });
  }

  pairDetail(bundleId: string, a: string, b: string): Promise<PairDetailDoc> {
    return this.get(`/api/bundles/${bundleId}/compat/pair/${a}/${b}`);
  }

  weightsEvaluate(bundleId: string, weights: Record<string, number>,
                  holdoutBundleId?: string): Promise<WhatIfDoc> {
    const payload: Record<string, unknown> = { weights };
    if (holdoutBundleId) payload.holdout_bundle_id = holdoutBundleId;
    return this.post(`/api/bundles/${bundleId}/weights/evaluate`, payload);
  }

  weightsSuggest(bundleId: string, objective: string, budget: number,
                 seed: number): Promise<ProposalDoc> {
    return this.post(`/api/bundles/${bundleId}/weights/suggest`,
                     { objective, budget, seed });
  }

  importance(bundleId: string, model: string, repeats: number,
             seed: number): Promise<ImportanceDoc> {
    return this.get(`/api/bundles/${bundleId}/xai/importance`, { model, repeats, seed });
  }

  pdp(bundleId: string, model: string, feature: string, grid: number): Promise<PdpDoc> {
    return this.get(`/api/bundles/${bundleId}/xai/pdp`, { model, feature, grid });
  }
}
