// Panel renderers: pure payload -> DOM, no computation beyond drawing.

import type {
  IndicatorsPayload,
  ProjectionPayload,
  RtPayload,
  SeriesPayload,
  WavesPayload,
} from "./api.js";
import type { AxisScale } from "./state.js";
import {
  DEFAULT_DIMS,
  appendAxes,
  seriesExtrema,
  appendBand,
  appendBars,
  appendLine,
  appendReference,
  appendZeroAnnotation,
  makeScale,
  svgRoot,
} from "./charts.js";

function panelShell(container: HTMLElement, title: string): HTMLElement {
  container.innerHTML = "";
  const heading = document.createElement("h3");
  heading.textContent = title;
  container.appendChild(heading);
  return container;
}

export function renderPlaceholder(container: HTMLElement, title: string, message: string): void {
  const shell = panelShell(container, title);
  const note = document.createElement("p");
  note.className = "placeholder";
  note.textContent = message;
  shell.appendChild(note);
}

export function renderError(container: HTMLElement, title: string, message: string): void {
  const shell = panelShell(container, title);
  const note = document.createElement("p");
  note.className = "error-banner";
  note.textContent = message;
  shell.appendChild(note);
}

export function renderEpicurve(
  container: HTMLElement,
  series: SeriesPayload,
  scale: AxisScale,
): void {
  const shell = panelShell(container, "Daily cases");
  const svg = svgRoot(DEFAULT_DIMS);
  const info = makeScale(series.confirmed, scale, DEFAULT_DIMS);
  appendBars(svg, series.confirmed, series.dates, info, scale, DEFAULT_DIMS, "bar-cases");
  if (series.smoothed) {
    appendLine(svg, series.smoothed, series.dates, info, scale, DEFAULT_DIMS, "line-smoothed");
  }
  appendAxes(svg, info, series.dates, DEFAULT_DIMS, seriesExtrema(series.confirmed, scale));
  shell.appendChild(svg);
  if (scale === "log") appendZeroAnnotation(shell, info.droppedZeros);
}

export function renderCumulative(
  container: HTMLElement,
  series: SeriesPayload,
  scale: AxisScale,
): void {
  const shell = panelShell(container, "Cumulative cases");
  const values = series.cumulative_confirmed ?? [];
  const svg = svgRoot(DEFAULT_DIMS);
  const info = makeScale(values, scale, DEFAULT_DIMS);
  appendLine(svg, values, series.dates, info, scale, DEFAULT_DIMS, "line-cumulative");
  appendAxes(svg, info, series.dates, DEFAULT_DIMS, seriesExtrema(values, scale));
  shell.appendChild(svg);
  if (scale === "log") appendZeroAnnotation(shell, info.droppedZeros);
}

export function renderRt(container: HTMLElement, payload: RtPayload): void {
  const title = payload.corrected ? "R(t), truncation corrected" : "R(t)";
  const shell = panelShell(container, title);
  const svg = svgRoot(DEFAULT_DIMS);
  const defined = payload.rt.filter((v): v is number => v !== null);
  const info = makeScale(defined.concat(1), "linear", DEFAULT_DIMS);
  appendReference(svg, 1, info, DEFAULT_DIMS); // epidemic threshold
  appendLine(svg, payload.rt, payload.dates, info, "linear", DEFAULT_DIMS, "line-rt");
  appendAxes(svg, info, payload.dates, DEFAULT_DIMS, seriesExtrema(defined, "linear"));
  shell.appendChild(svg);
}

export function renderProjection(
  container: HTMLElement,
  history: SeriesPayload,
  projection: ProjectionPayload,
  scale: AxisScale,
  historyDays = 60,
): void {
  const shell = panelShell(container, "Projection");
  const tail = Math.min(historyDays, history.confirmed.length);
  const histValues = history.confirmed.slice(-tail);
  const histDates = history.dates.slice(-tail);
  const horizon = projection.quantiles.q50.length;
  const projDates = Array.from({ length: horizon }, (_, i) => `${projection.start}+${i}`);
  projDates[0] = projection.start;

  // one x-axis: history slots then projected slots
  const total = histValues.length + horizon;
  const svg = svgRoot(DEFAULT_DIMS);
  const info = makeScale(histValues.concat(projection.quantiles.q95), scale, DEFAULT_DIMS);

  appendBars(svg, histValues, histDates, info, scale, DEFAULT_DIMS, "bar-history", 0, total);
  appendBand(svg, projection.quantiles.q5, projection.quantiles.q95, info, scale,
             DEFAULT_DIMS, "band-90", histValues.length, total);
  appendLine(svg, projection.quantiles.q50, projDates, info, scale, DEFAULT_DIMS,
             "line-median", histValues.length, total);
  appendAxes(svg, info, histDates.concat(projDates), DEFAULT_DIMS,
             seriesExtrema(histValues.concat(projection.quantiles.q95), scale));
  shell.appendChild(svg);
  if (scale === "log") appendZeroAnnotation(shell, info.droppedZeros);

  const meta = document.createElement("p");
  meta.className = "projection-meta";
  meta.innerHTML =
    `R used: <span class="num" data-value="${projection.rt_used}">${projection.rt_used}</span>, ` +
    `seed: <span class="num" data-value="${projection.seed}">${projection.seed}</span>`;
  shell.appendChild(meta);
}

const INDICATOR_LABELS: [keyof IndicatorsPayload, string][] = [
  ["cases_per_million", "Cases per million"],
  ["deaths_per_million", "Deaths per million"],
  ["cfr", "Case fatality rate"],
  ["test_positivity", "Test positivity"],
  ["tests_per_million", "Tests per million"],
];

export function renderIndicators(container: HTMLElement, payload: IndicatorsPayload): void {
  const shell = panelShell(container, "Indicators");
  const list = document.createElement("dl");
  list.className = "indicators";
  for (const [key, label] of INDICATOR_LABELS) {
    const value = payload[key];
    if (value === null || value === undefined) continue;
    const term = document.createElement("dt");
    term.textContent = label;
    const detail = document.createElement("dd");
    detail.className = "num";
    detail.setAttribute("data-value", String(value));
    detail.textContent = String(value);
    list.appendChild(term);
    list.appendChild(detail);
  }
  shell.appendChild(list);
}

export function renderWaves(container: HTMLElement, payload: WavesPayload): void {
  const shell = panelShell(container, "Waves");
  const list = document.createElement("dl");
  list.className = "waves";
  const rows: [string, string][] = [
    ["First-wave peak", payload.first_peak],
    ["Peak 95% CI", `${payload.first_peak_ci[0]} to ${payload.first_peak_ci[1]}`],
    ["Second wave start", payload.valley],
  ];
  for (const [label, value] of rows) {
    const term = document.createElement("dt");
    term.textContent = label;
    const detail = document.createElement("dd");
    detail.className = "date";
    detail.textContent = value;
    list.appendChild(term);
    list.appendChild(detail);
  }
  shell.appendChild(list);
}
