// Typed client for the epiwatch JSON API. The dashboard performs no
// epidemiological computation: everything it draws comes from these payloads.

export type RegionLevel = "nation" | "state" | "district";

export interface RegionInfo {
  code: string;
  name: string;
  level: RegionLevel;
  parent_code: string | null;
}

export interface SeriesPayload {
  dates: string[];
  confirmed: number[];
  recovered: number[];
  deceased: number[];
  tested?: number[];
  smoothed?: number[];
  cumulative_confirmed?: number[];
  cumulative_deceased?: number[];
}

export interface RtPayload {
  dates: string[];
  rt: (number | null)[];
  corrected: boolean;
}

export interface QuantileBands {
  q5: number[];
  q25: number[];
  q50: number[];
  q75: number[];
  q95: number[];
}

export interface ProjectionPayload {
  start: string;
  horizon: number;
  rt_used: number;
  seed: number;
  quantiles: QuantileBands;
  expected: number[];
}

export interface WavesPayload {
  first_peak: string;
  first_peak_ci: [string, string];
  valley: string;
}

export interface IndicatorsPayload {
  cases_per_million: number;
  deaths_per_million: number;
  cfr: number;
  test_positivity: number | null;
  tests_per_million: number | null;
}

export interface ProjectionQuery {
  horizon: number;
  sims: number;
  seed: number;
  rtOverride?: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, readonly detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function request<T>(url: string, signal?: AbortSignal): Promise<T> {
  const response = await fetch(url, { signal });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string, params?: Record<string, string>): string {
    const query = params ? new URLSearchParams(params).toString() : "";
    return this.baseUrl + path + (query ? `?${query}` : "");
  }

  regions(signal?: AbortSignal): Promise<RegionInfo[]> {
    return request(this.url("/api/v1/regions"), signal);
  }

  series(code: string, smooth: number, signal?: AbortSignal): Promise<SeriesPayload> {
    return request(
      this.url(`/api/v1/regions/${code}/series`,
               { smooth: String(smooth), cumulative: "1" }),
      signal,
    );
  }

  rt(code: string, signal?: AbortSignal): Promise<RtPayload> {
    return request(
      this.url(`/api/v1/regions/${code}/rt`, { correction: "truncation" }),
      signal,
    );
  }

  projection(code: string, q: ProjectionQuery, signal?: AbortSignal): Promise<ProjectionPayload> {
    const params: Record<string, string> = {
      horizon: String(q.horizon),
      sims: String(q.sims),
      seed: String(q.seed),
    };
    if (q.rtOverride !== undefined) params.rt_override = String(q.rtOverride);
    return request(this.url(`/api/v1/regions/${code}/projection`, params), signal);
  }

  waves(code: string, smooth: number, signal?: AbortSignal): Promise<WavesPayload> {
    return request(
      this.url(`/api/v1/regions/${code}/waves`, { smooth: String(smooth) }),
      signal,
    );
  }

  indicators(code: string, signal?: AbortSignal): Promise<IndicatorsPayload> {
    return request(this.url(`/api/v1/regions/${code}/indicators`), signal);
  }
}
