// Application wiring: region cascade, panel refresh, what-if controls,
// URL-mirrored view state, and cancellation of stale fetches.

import { ApiClient, ApiError } from "./api.js";
import type { ProjectionPayload, RegionInfo, SeriesPayload } from "./api.js";
import {
  renderCumulative,
  renderEpicurve,
  renderError,
  renderIndicators,
  renderPlaceholder,
  renderProjection,
  renderRt,
  renderWaves,
} from "./panels.js";
import {
  applySelection,
  buildRegionIndex,
  populateDistrictSelect,
  populateStateSelect,
  stateFor,
  type RegionIndex,
} from "./selector.js";
import {
  ALL_PANELS,
  decodeViewState,
  encodeViewState,
  normalizeState,
  type PanelId,
  type ViewState,
} from "./state.js";

export const WHATIF_DEBOUNCE_MS = 250;

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), delayMs);
  };
}

export interface AppElements {
  stateSelect: HTMLSelectElement;
  districtSelect: HTMLSelectElement;
  scaleToggle: HTMLInputElement;
  smoothInput: HTMLInputElement;
  horizonInput: HTMLInputElement;
  simsInput: HTMLInputElement;
  seedInput: HTMLInputElement;
  rtOverrideInput: HTMLInputElement;
  panelToggles: Map<PanelId, HTMLInputElement>;
  panels: Map<PanelId, HTMLElement>;
  banner: HTMLElement;
}

export function collectElements(root: Document | HTMLElement): AppElements {
  const get = <T extends HTMLElement>(selector: string): T => {
    const node = root.querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as T;
  };
  const panelToggles = new Map<PanelId, HTMLInputElement>();
  const panels = new Map<PanelId, HTMLElement>();
  for (const id of ALL_PANELS) {
    panelToggles.set(id, get<HTMLInputElement>(`#toggle-${id}`));
    panels.set(id, get<HTMLElement>(`#panel-${id}`));
  }
  return {
    stateSelect: get<HTMLSelectElement>("#state-select"),
    districtSelect: get<HTMLSelectElement>("#district-select"),
    scaleToggle: get<HTMLInputElement>("#scale-log"),
    smoothInput: get<HTMLInputElement>("#smooth-window"),
    horizonInput: get<HTMLInputElement>("#horizon"),
    simsInput: get<HTMLInputElement>("#sims"),
    seedInput: get<HTMLInputElement>("#seed"),
    rtOverrideInput: get<HTMLInputElement>("#rt-override"),
    panelToggles,
    panels,
  banner: get<HTMLElement>("#banner"),
  };
}

interface PanelData {
  series?: SeriesPayload;
  projection?: ProjectionPayload;
}

export class App {
  state: ViewState;
  index: RegionIndex = buildRegionIndex([]);
  private readonly cache: PanelData = {};
  private aborter: AbortController | null = null;
  private projectionAborter: AbortController | null = null;

  constructor(
    readonly client: ApiClient,
    readonly ui: AppElements,
    readonly win: Pick<Window, "history" | "location"> = window,
  ) {
    this.state = decodeViewState(this.win.location.search, "");
  }

  async boot(): Promise<RegionInfo[]> {
    const regions = await this.client.regions();
    this.index = buildRegionIndex(regions);
    if (!this.index.byCode.has(this.state.region)) {
      const fallback = this.index.nation?.code ?? regions[0]?.code ?? "";
      this.state = { ...this.state, region: fallback };
    }
    populateStateSelect(this.ui.stateSelect, this.index);
    applySelection(this.ui.stateSelect, this.ui.districtSelect, this.index, this.state.region);
    this.pushControls();
    this.wireEvents();
    this.syncUrl();
    await this.loadAllPanels();
    return regions;
  }

  /** Reflect this.state into the form controls. */
  private pushControls(): void {
    this.ui.scaleToggle.checked = this.state.scale === "log";
    this.ui.smoothInput.value = String(this.state.smoothWindow);
    this.ui.horizonInput.value = String(this.state.projection.horizon);
    this.ui.simsInput.value = String(this.state.projection.sims);
    this.ui.seedInput.value = String(this.state.projection.seed);
    this.ui.rtOverrideInput.value =
      this.state.projection.rtOverride === undefined
        ? ""
        : String(this.state.projection.rtOverride);
    for (const [id, toggle] of this.ui.panelToggles) {
      toggle.checked = this.state.panels.includes(id);
    }
  }

  private wireEvents(): void {
    this.ui.stateSelect.addEventListener("change", () => {
      const stateCode = this.ui.stateSelect.value;
      populateDistrictSelect(this.ui.districtSelect, this.index, stateCode);
      void this.selectRegion(stateCode);
    });
    this.ui.districtSelect.addEventListener("change", () => {
      void this.selectRegion(this.ui.districtSelect.value);
    });
    this.ui.scaleToggle.addEventListener("change", () => {
      this.state = normalizeState({
        ...this.state,
        scale: this.ui.scaleToggle.checked ? "log" : "linear",
      });
      this.syncUrl();
      this.rerenderFromCache();
    });
    for (const [id, toggle] of this.ui.panelToggles) {
      toggle.addEventListener("change", () => this.togglePanel(id, toggle.checked));
    }
    const onWhatif = debounce(() => void this.applyWhatif(), WHATIF_DEBOUNCE_MS);
    for (const input of [this.ui.horizonInput, this.ui.simsInput, this.ui.seedInput,
                         this.ui.rtOverrideInput]) {
      input.addEventListener("input", onWhatif);
    }
    this.ui.smoothInput.addEventListener("change", () => {
      this.state = normalizeState({
        ...this.state,
        smoothWindow: Number(this.ui.smoothInput.value),
      });
      this.pushControls();
      this.syncUrl();
      void this.loadAllPanels();
    });
  }

  async selectRegion(code: string): Promise<void> {
    if (!code || code === this.state.region) return;
    this.state = { ...this.state, region: code };
    applySelection(this.ui.stateSelect, this.ui.districtSelect, this.index, code);
    this.syncUrl();
    await this.loadAllPanels();
  }

  private togglePanel(id: PanelId, on: boolean): void {
    const wanted = new Set(this.state.panels);
    if (on) wanted.add(id);
    else wanted.delete(id);
    if (!wanted.size) {
      wanted.add(id); // never hide everything
      const toggle = this.ui.panelToggles.get(id);
      if (toggle) toggle.checked = true;
    }
    this.state = normalizeState({ ...this.state, panels: [...wanted] as PanelId[] });
    this.syncUrl();
    for (const [panel, container] of this.ui.panels) {
      container.hidden = !this.state.panels.includes(panel);
    }
  }

  async applyWhatif(): Promise<void> {
    const rtRaw = this.ui.rtOverrideInput.value.trim();
    this.state = normalizeState({
      ...this.state,
      projection: {
        horizon: Number(this.ui.horizonInput.value),
        sims: Number(this.ui.simsInput.value),
        seed: Number(this.ui.seedInput.value),
        ...(rtRaw === "" ? {} : { rtOverride: Number(rtRaw) }),
      },
    });
    this.pushControls();
    this.syncUrl();
    await this.loadProjection();
  }

  syncUrl(): void {
    this.win.history.replaceState(null, "", "?" + encodeViewState(this.state));
  }

  private panel(id: PanelId): HTMLElement {
    const node = this.ui.panels.get(id);
    if (!node) throw new Error(`no panel container for ${id}`);
    return node;
  }

  private showError(id: PanelId, title: string, error: unknown): void {
    if (error instanceof DOMException && error.name === "AbortError") return;
    if (error instanceof ApiError) {
      if (error.status === 422) {
        renderPlaceholder(this.panel(id), title, "insufficient data for this region");
        return;
      }
      // surface the API's own message (400s carry the parameter complaint)
      renderError(this.panel(id), title, error.detail);
      return;
    }
    renderError(this.panel(id), title, "request failed; retry after checking the service");
  }

  async loadAllPanels(): Promise<void> {
    this.aborter?.abort();
    this.projectionAborter?.abort();
    const aborter = new AbortController();
    this.aborter = aborter;
    const { signal } = aborter;
    const code = this.state.region;
    for (const [panel, container] of this.ui.panels) {
      container.hidden = !this.state.panels.includes(panel);
    }

    const jobs: Promise<void>[] = [
      this.client.series(code, this.state.smoothWindow, signal).then((series) => {
        if (signal.aborted) return;
        this.cache.series = series;
        renderEpicurve(this.panel("epicurve"), series, this.state.scale);
        renderCumulative(this.panel("cumulative"), series, this.state.scale);
        if (this.cache.projection) {
          renderProjection(this.panel("projection"), series, this.cache.projection,
                           this.state.scale);
        }
      }).catch((error) => {
        this.showError("epicurve", "Daily cases", error);
        this.showError("cumulative", "Cumulative cases", error);
      }),
      this.client.rt(code, signal).then((payload) => {
        if (signal.aborted) return;
        renderRt(this.panel("rt"), payload);
      }).catch((error) => this.showError("rt", "R(t)", error)),
      this.client.waves(code, this.state.smoothWindow, signal).then((payload) => {
        if (signal.aborted) return;
        renderWaves(this.panel("waves"), payload);
      }).catch((error) => this.showError("waves", "Waves", error)),
      this.client.indicators(code, signal).then((payload) => {
        if (signal.aborted) return;
        renderIndicators(this.panel("indicators"), payload);
      }).catch((error) => this.showError("indicators", "Indicators", error)),
      this.loadProjection(signal),
    ];
    await Promise.all(jobs);
  }

  async loadProjection(parentSignal?: AbortSignal): Promise<void> {
    this.projectionAborter?.abort();
    const aborter = new AbortController();
    this.projectionAborter = aborter;
    const signal = parentSignal ?? aborter.signal;
    const code = this.state.region;
    try {
      const projection = await this.client.projection(code, {
        horizon: this.state.projection.horizon,
        sims: this.state.projection.sims,
        seed: this.state.projection.seed,
        ...(this.state.projection.rtOverride !== undefined
          ? { rtOverride: this.state.projection.rtOverride }
          : {}),
      }, signal);
      if (signal.aborted || code !== this.state.region) return;
      this.cache.projection = projection;
      const series = this.cache.series;
      if (series) {
        renderProjection(this.panel("projection"), series, projection, this.state.scale);
      }
    } catch (error) {
      this.showError("projection", "Projection", error);
    }
  }

  /** Axis-scale changes re-render cached payloads; no refetch, no reload. */
  rerenderFromCache(): void {
    const { series, projection } = this.cache;
    if (series) {
      renderEpicurve(this.panel("epicurve"), series, this.state.scale);
      renderCumulative(this.panel("cumulative"), series, this.state.scale);
      if (projection) {
        renderProjection(this.panel("projection"), series, projection, this.state.scale);
      }
    }
  }
}

export async function bootstrap(doc: Document, baseUrl = ""): Promise<App> {
  const app = new App(new ApiClient(baseUrl), collectElements(doc));
  try {
    await app.boot();
  } catch (error) {
    const banner = doc.querySelector("#banner");
    if (banner) {
      banner.textContent = "failed to load the region list; data may be stale";
      (banner as HTMLElement).hidden = false;
      const retry = doc.createElement("button");
      retry.textContent = "retry";
      retry.addEventListener("click", () => void bootstrap(doc, baseUrl));
      banner.appendChild(retry);
    }
    throw error;
  }
  return app;
}
