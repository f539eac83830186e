/** Tab state kept in the URL hash for shareability. */

export const TABS = ["metrics", "compatimetrics", "weights", "xai"] as const;
export type Tab = (typeof TABS)[number];

export interface HashState {
  tab: Tab;
}

export function parseHash(hash: string): HashState {
  const clean = hash.startsWith("#") ? hash.slice(1) : hash;
  const params = new URLSearchParams(clean);
  const tab = params.get("tab");
  return { tab: (TABS as readonly string[]).includes(tab ?? "") ? (tab as Tab) : "metrics" };
}

export function buildHash(state: HashState): string {
  return `#tab=${state.tab}`;
}

/** Which tabs are usable for a bundle, with reasons for the disabled ones. */
export function tabAvailability(analyses: {
  metrics: boolean;
  compatimetrics: boolean;
  weights_lab: boolean;
  xai: boolean;
}): Record<Tab, { enabled: boolean; reason?: string }> {
  return {
    metrics: { enabled: analyses.metrics },
    compatimetrics: { enabled: analyses.compatimetrics },
    weights: analyses.weights_lab
      ? { enabled: true }
      : {
          enabled: false,
          reason: "Weight analysis needs predicted probabilities for every " +
            "component model; this bundle has none, so the weighted ensemble " +
            "cannot be recombined.",
        },
    xai: analyses.xai
      ? { enabled: true }
      : { enabled: false, reason: "No component model carries a predictor reference." },
  };
}
