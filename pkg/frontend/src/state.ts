// ViewState and its URL serialization. encode/decode form a bijection on the
// reachable state space so every view is shareable and bookmarkable.

export type AxisScale = "linear" | "log";

export const ALL_PANELS = [
  "epicurve",
  "cumulative",
  "rt",
  "projection",
  "indicators",
  "waves",
] as const;

export type PanelId = (typeof ALL_PANELS)[number];

export interface ProjectionParams {
  horizon: number;
  sims: number;
  seed: number;
  rtOverride?: number;
}

export interface ViewState {
  region: string;
  scale: AxisScale;
  smoothWindow: number;
  projection: ProjectionParams;
  panels: PanelId[]; // canonical order, non-empty subset of ALL_PANELS
}

export const LIMITS = {
  horizon: { min: 1, max: 60 },
  sims: { min: 1, max: 100_000 },
  smooth: { min: 1, max: 60 },
} as const;

export function defaultState(region: string): ViewState {
  return {
    region,
    scale: "linear",
    smoothWindow: 14,
    projection: { horizon: 15, sims: 1000, seed: 42 },
    panels: [...ALL_PANELS],
  };
}

function clamp(value: number, lo: number, hi: number): number {
  return Math.min(Math.max(value, lo), hi);
}

function canonicalPanels(panels: Iterable<string>): PanelId[] {
  const wanted = new Set(panels);
  const result = ALL_PANELS.filter((p) => wanted.has(p));
  return result.length ? result : [...ALL_PANELS];
}

export function normalizeState(state: ViewState): ViewState {
  return {
    region: state.region,
    scale: state.scale === "log" ? "log" : "linear",
    smoothWindow: clamp(Math.round(state.smoothWindow), LIMITS.smooth.min, LIMITS.smooth.max),
    projection: {
      horizon: clamp(Math.round(state.projection.horizon), LIMITS.horizon.min, LIMITS.horizon.max),
      sims: clamp(Math.round(state.projection.sims), LIMITS.sims.min, LIMITS.sims.max),
      seed: Math.round(state.projection.seed),
      ...(state.projection.rtOverride !== undefined && state.projection.rtOverride >= 0
        ? { rtOverride: state.projection.rtOverride }
        : {}),
    },
    panels: canonicalPanels(state.panels),
  };
}

export function encodeViewState(state: ViewState): string {
  const s = normalizeState(state);
  const params = new URLSearchParams();
  params.set("region", s.region);
  params.set("scale", s.scale);
  params.set("smooth", String(s.smoothWindow));
  params.set("horizon", String(s.projection.horizon));
  params.set("sims", String(s.projection.sims));
  params.set("seed", String(s.projection.seed));
  if (s.projection.rtOverride !== undefined) {
    params.set("rt", String(s.projection.rtOverride));
  }
  params.set("panels", s.panels.join(","));
  return params.toString();
}

function intParam(params: URLSearchParams, key: string, fallback: number): number {
  const raw = params.get(key);
  if (raw === null || raw.trim() === "") return fallback;
  const value = Number(raw);
  return Number.isFinite(value) ? value : fallback;
}

export function decodeViewState(query: string, fallbackRegion: string): ViewState {
  const params = new URLSearchParams(query.startsWith("?") ? query.slice(1) : query);
  const base = defaultState(params.get("region") ?? fallbackRegion);
  const rtRaw = params.get("rt");
  const rt = rtRaw !== null && rtRaw.trim() !== "" ? Number(rtRaw) : undefined;
  return normalizeState({
    region: base.region,
    scale: (params.get("scale") as AxisScale) ?? base.scale,
    smoothWindow: intParam(params, "smooth", base.smoothWindow),
    projection: {
      horizon: intParam(params, "horizon", base.projection.horizon),
      sims: intParam(params, "sims", base.projection.sims),
      seed: intParam(params, "seed", base.projection.seed),
      ...(rt !== undefined && Number.isFinite(rt) && rt >= 0 ? { rtOverride: rt } : {}),
    },
    panels: canonicalPanels((params.get("panels") ?? ALL_PANELS.join(",")).split(",")),
  });
}

export function statesEqual(a: ViewState, b: ViewState): boolean {
  return encodeViewState(a) === encodeViewState(b);
}
