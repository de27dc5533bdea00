// Stubbed API: a fetch fake with abort semantics plus canonical payload
// fixtures. Tests assert the DOM against these payloads and nothing else.

import { vi } from "vitest";

import type {
  IndicatorsPayload,
  ProjectionPayload,
  RegionInfo,
  RtPayload,
  SeriesPayload,
  WavesPayload,
} from "../src/api.js";

export interface RecordedRequest {
  path: string;
  params: URLSearchParams;
}

export type RouteResult = { status?: number; body: unknown };
export type RouteHandler = (
  path: string,
  params: URLSearchParams,
) => RouteResult | Promise<RouteResult>;

export function installFetchStub(handler: RouteHandler): RecordedRequest[] {
  const calls: RecordedRequest[] = [];
  const fake = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = new URL(String(input), "http://stub.local");
    calls.push({ path: url.pathname, params: url.searchParams });
    const signal = init?.signal ?? undefined;
    const abortError = () => new DOMException("The operation was aborted.", "AbortError");
    if (signal?.aborted) throw abortError();
    const result = await Promise.race([
      Promise.resolve(handler(url.pathname, url.searchParams)),
      new Promise<never>((_, reject) => {
        signal?.addEventListener("abort", () => reject(abortError()), { once: true });
      }),
    ]);
    if (signal?.aborted) throw abortError();
    const status = result.status ?? 200;
    return {
      ok: status >= 200 && status < 300,
      status,
      statusText: `status ${status}`,
      json: async () => result.body,
    } as Response;
  };
  vi.stubGlobal("fetch", vi.fn(fake));
  return calls;
}

export const REGIONS: RegionInfo[] = [
  { code: "IN", name: "India", level: "nation", parent_code: null },
  { code: "IN-KL", name: "Kerala", level: "state", parent_code: "IN" },
  { code: "IN-MH", name: "Maharashtra", level: "state", parent_code: "IN" },
  { code: "IN-MH-Mumbai", name: "Mumbai", level: "district", parent_code: "IN-MH" },
  { code: "IN-MH-Pune", name: "Pune", level: "district", parent_code: "IN-MH" },
];

const DATES = ["2021-03-01", "2021-03-02", "2021-03-03", "2021-03-04", "2021-03-05"];

export const SERIES: Record<string, SeriesPayload> = {
  // contains zero-count days (log scale must drop them and annotate)
  "IN-MH-Pune": {
    dates: DATES,
    confirmed: [12, 0, 31, 0, 57],
    recovered: [1, 2, 3, 4, 5],
    deceased: [0, 0, 1, 0, 2],
    smoothed: [12.5, 6.25, 14.3, 10.7, 20.1],
    cumulative_confirmed: [12, 12, 43, 43, 100],
    cumulative_deceased: [0, 0, 1, 1, 3],
  },
  // strictly positive (log toggle keeps every point)
  "IN-KL": {
    dates: DATES,
    confirmed: [41, 44, 52, 61, 73],
    recovered: [10, 11, 12, 13, 14],
    deceased: [1, 1, 2, 2, 3],
    tested: [500, 510, 520, 530, 540],
    smoothed: [41.5, 42.5, 45.6, 49.5, 54.2],
    cumulative_confirmed: [41, 85, 137, 198, 271],
    cumulative_deceased: [1, 2, 4, 6, 9],
  },
  "IN-MH": {
    dates: DATES,
    confirmed: [103, 111, 125, 131, 149],
    recovered: [20, 21, 22, 23, 24],
    deceased: [2, 3, 3, 4, 5],
    smoothed: [101.5, 104.25, 110.3, 115.7, 123.9],
    cumulative_confirmed: [103, 214, 339, 470, 619],
    cumulative_deceased: [2, 5, 8, 12, 17],
  },
  IN: {
    dates: DATES,
    confirmed: [144, 155, 177, 192, 222],
    recovered: [30, 32, 34, 36, 38],
    deceased: [3, 4, 5, 6, 8],
    smoothed: [143.5, 146.75, 155.9, 163.2, 175.4],
    cumulative_confirmed: [144, 299, 476, 668, 890],
    cumulative_deceased: [3, 7, 12, 18, 26],
  },
};

export const RT: Record<string, RtPayload> = {
  "IN-MH-Pune": { dates: DATES, rt: [null, 1.42, 1.18, 0.93, null], corrected: true },
  "IN-KL": { dates: DATES, rt: [1.21, 1.17, 1.12, 1.08, null], corrected: true },
  "IN-MH": { dates: DATES, rt: [1.31, 1.27, 1.2, 1.11, null], corrected: true },
  IN: { dates: DATES, rt: [1.28, 1.24, 1.19, 1.1, null], corrected: true },
};

export const WAVES: Record<string, WavesPayload | { status: number; detail: string }> = {
  "IN-MH-Pune": {
    first_peak: "2021-03-03",
    first_peak_ci: ["2021-03-02", "2021-03-04"],
    valley: "2021-03-04",
  },
  "IN-KL": { status: 422, detail: "series has no interior peak" },
  "IN-MH": {
    first_peak: "2021-03-02",
    first_peak_ci: ["2021-03-01", "2021-03-03"],
    valley: "2021-03-05",
  },
  IN: {
    first_peak: "2021-03-02",
    first_peak_ci: ["2021-03-01", "2021-03-03"],
    valley: "2021-03-05",
  },
};

export const INDICATORS: Record<string, IndicatorsPayload> = {
  "IN-MH-Pune": {
    cases_per_million: 10.638298,
    deaths_per_million: 0.319149,
    cfr: 0.03,
    test_positivity: null,
    tests_per_million: null,
  },
  "IN-KL": {
    cases_per_million: 7.742857,
    deaths_per_million: 0.257143,
    cfr: 0.033210,
    test_positivity: 0.104231,
    tests_per_million: 74.571429,
  },
  "IN-MH": {
    cases_per_million: 5.032520,
    deaths_per_million: 0.138211,
    cfr: 0.027467,
    test_positivity: null,
    tests_per_million: null,
  },
  IN: {
    cases_per_million: 0.644928,
    deaths_per_million: 0.018841,
    cfr: 0.029213,
    test_positivity: null,
    tests_per_million: null,
  },
};

/** Deterministic projection stub: bands derive from (code, horizon, seed,
 * rt_override) so tests can predict exactly what the UI must render. */
export function projectionFor(
  code: string,
  params: URLSearchParams,
): ProjectionPayload {
  const horizon = Number(params.get("horizon") ?? "15");
  const seed = Number(params.get("seed") ?? "0");
  const rtRaw = params.get("rt_override");
  const override = rtRaw !== null && rtRaw !== "" ? Number(rtRaw) : undefined;
  const rtUsed = override !== undefined ? override : 1.23;
  const base = override === 0 ? 0 : 40 + (seed % 7) + code.length;
  const ramp = (k: number, t: number) => Math.round(base * k * (1 + 0.05 * t) * 100) / 100;
  const mk = (k: number) => Array.from({ length: horizon }, (_, t) => ramp(k, t));
  return {
    start: "2021-03-06",
    horizon,
    rt_used: rtUsed,
    seed,
    quantiles: { q5: mk(0.6), q25: mk(0.85), q50: mk(1.0), q75: mk(1.2), q95: mk(1.5) },
    expected: mk(1.02),
  };
}

/** Default router over the canonical fixtures. */
export function defaultRoutes(path: string, params: URLSearchParams): RouteResult {
  const match = path.match(/^\/api\/v1\/regions(?:\/([^/]+)\/(\w+))?$/);
  if (!match) return { status: 404, body: { error: "UnknownRegion", detail: "no route" } };
  const [, code, resource] = match;
  if (!code) return { body: REGIONS };
  if (!REGIONS.some((r) => r.code === code)) {
    return { status: 404, body: { error: "UnknownRegion", detail: `unknown region '${code}'` } };
  }
  switch (resource) {
    case "series":
      return { body: SERIES[code] };
    case "rt":
      return { body: RT[code] };
    case "projection":
      return { body: projectionFor(code, params) };
    case "waves": {
      const payload = WAVES[code];
      if (payload && "status" in payload) {
        return { status: payload.status, body: { error: "NoWaveStructure", detail: payload.detail } };
      }
      return { body: payload };
    }
    case "indicators":
      return { body: INDICATORS[code] };
    default:
      return { status: 404, body: { error: "UnknownRegion", detail: "no such resource" } };
  }
}

/** Every numeric value reachable in a region's stub payloads (plus the
 * projection numbers for arbitrary params, added by the caller). */
export function payloadNumbers(code: string): Set<number> {
  const numbers = new Set<number>();
  const visit = (value: unknown): void => {
    if (typeof value === "number") numbers.add(value);
    else if (Array.isArray(value)) value.forEach(visit);
    else if (value && typeof value === "object") Object.values(value).forEach(visit);
  };
  visit(SERIES[code]);
  visit(RT[code]);
  const waves = WAVES[code];
  if (waves && !("status" in waves)) visit(waves);
  visit(INDICATORS[code]);
  return numbers;
}
