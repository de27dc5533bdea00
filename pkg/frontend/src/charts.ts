// Hand-rolled SVG chart primitives. Every data mark carries its payload
// number in a data-value attribute and axis labels render payload extrema
// verbatim, so tests can trace each on-screen numeric back to the API.
//
// Marks accept a slot offset and a total slot count so series that share one
// x-axis (history bars followed by a projection fan) can be positioned
// without inventing filler values.

export type AxisScale = "linear" | "log";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ChartDims {
  width: number;
  height: number;
  padLeft: number;
  padBottom: number;
  padTop: number;
}

export const DEFAULT_DIMS: ChartDims = {
  width: 640,
  height: 220,
  padLeft: 58,
  padBottom: 18,
  padTop: 8,
};

export interface ScaleInfo {
  toY: (value: number) => number;
  min: number;
  max: number;
  droppedZeros: number;
}

export function makeScale(values: number[], scale: AxisScale, dims: ChartDims): ScaleInfo {
  const usable = scale === "log" ? values.filter((v) => v > 0) : values;
  const droppedZeros = values.length - usable.length;
  const max = usable.length ? Math.max(...usable) : 1;
  const min = scale === "log" ? (usable.length ? Math.min(...usable) : 1) : 0;
  const innerHeight = dims.height - dims.padTop - dims.padBottom;
  const toY = (value: number): number => {
    let fraction: number;
    if (scale === "log") {
      const span = Math.log(max) - Math.log(min) || 1;
      fraction = (Math.log(value) - Math.log(min)) / span;
    } else {
      fraction = max === 0 ? 0 : value / max;
    }
    return dims.height - dims.padBottom - fraction * innerHeight;
  };
  return { toY, min, max, droppedZeros };
}

function el<K extends keyof SVGElementTagNameMap>(
  name: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

export function svgRoot(dims: ChartDims): SVGSVGElement {
  return el("svg", {
    viewBox: `0 0 ${dims.width} ${dims.height}`,
    width: String(dims.width),
    height: String(dims.height),
    role: "img",
  });
}

function xPos(slot: number, total: number, dims: ChartDims): number {
  const inner = dims.width - dims.padLeft;
  return dims.padLeft + (inner * slot) / Math.max(total, 1);
}

function slotWidth(total: number, dims: ChartDims): number {
  return Math.max((dims.width - dims.padLeft) / Math.max(total, 1) - 1, 1);
}

/** Vertical bars; on a log scale zero values are omitted (annotated by the caller). */
export function appendBars(
  svg: SVGSVGElement,
  values: number[],
  labels: string[],
  scale: ScaleInfo,
  axis: AxisScale,
  dims: ChartDims,
  cssClass: string,
  offset = 0,
  total = values.length,
): void {
  const baseline = dims.height - dims.padBottom;
  values.forEach((value, i) => {
    if (axis === "log" && value <= 0) return;
    const y = scale.toY(value);
    svg.appendChild(el("rect", {
      x: String(xPos(offset + i, total, dims)),
      y: String(Math.min(y, baseline)),
      width: String(slotWidth(total, dims)),
      height: String(Math.max(baseline - y, 0)),
      class: cssClass,
      "data-value": String(value),
      "data-label": labels[i] ?? "",
    }));
  });
}

/** Polyline through the points; null values break the line into segments. */
export function appendLine(
  svg: SVGSVGElement,
  values: (number | null)[],
  labels: string[],
  scale: ScaleInfo,
  axis: AxisScale,
  dims: ChartDims,
  cssClass: string,
  offset = 0,
  total = values.length,
): void {
  let segment: string[] = [];
  const flush = () => {
    if (segment.length > 1) {
      svg.appendChild(el("polyline", {
        points: segment.join(" "),
        fill: "none",
        class: cssClass,
      }));
    }
    segment = [];
  };
  values.forEach((value, i) => {
    if (value === null || (axis === "log" && value <= 0)) {
      flush();
      return;
    }
    const x = xPos(offset + i, total, dims) + slotWidth(total, dims) / 2;
    segment.push(`${x},${scale.toY(value)}`);
    svg.appendChild(el("circle", {
      cx: String(x),
      cy: String(scale.toY(value)),
      r: "1.6",
      class: `${cssClass}-pt`,
      "data-value": String(value),
      "data-label": labels[i] ?? "",
    }));
  });
  flush();
}

/** Shaded band between two aligned arrays (the 5-95% projection fan). */
export function appendBand(
  svg: SVGSVGElement,
  lower: number[],
  upper: number[],
  scale: ScaleInfo,
  axis: AxisScale,
  dims: ChartDims,
  cssClass: string,
  offset = 0,
  total = upper.length,
): void {
  const half = slotWidth(total, dims) / 2;
  const coord = (i: number, v: number) =>
    `${xPos(offset + i, total, dims) + half},${scale.toY(axis === "log" ? Math.max(v, scale.min) : v)}`;
  const points: string[] = [];
  upper.forEach((v, i) => points.push(coord(i, v)));
  for (let i = lower.length - 1; i >= 0; i--) points.push(coord(i, lower[i] ?? 0));
  const polygon = el("polygon", { points: points.join(" "), class: cssClass });
  polygon.setAttribute("data-upper", upper.join(","));
  polygon.setAttribute("data-lower", lower.join(","));
  svg.appendChild(polygon);
}

/** Dashed horizontal reference (e.g. the epidemic threshold); no text label. */
export function appendReference(
  svg: SVGSVGElement,
  value: number,
  scale: ScaleInfo,
  dims: ChartDims,
): void {
  const y = scale.toY(value);
  svg.appendChild(el("line", {
    x1: String(dims.padLeft),
    x2: String(dims.width),
    y1: String(y),
    y2: String(y),
    class: "reference",
    "stroke-dasharray": "4 3",
  }));
}

/** Extrema of the plotted payload values (log axes ignore non-positives). */
export function seriesExtrema(values: number[], axis: AxisScale): [number, number] | null {
  const usable = axis === "log" ? values.filter((v) => v > 0) : values;
  if (!usable.length) return null;
  return [Math.min(...usable), Math.max(...usable)];
}

/** Axis labels: payload extrema rendered verbatim plus first/last dates.
 * Only actual data values appear as label text, each at its own height. */
export function appendAxes(
  svg: SVGSVGElement,
  scale: ScaleInfo,
  labels: string[],
  dims: ChartDims,
  extrema: [number, number] | null = [scale.min, scale.max],
): void {
  const text = (x: number, y: number, content: string, cls: string, anchor = "end") => {
    const node = el("text", { x: String(x), y: String(y), class: cls, "text-anchor": anchor });
    node.textContent = content;
    svg.appendChild(node);
  };
  if (extrema) {
    const [lo, hi] = extrema;
    text(dims.padLeft - 4, scale.toY(hi) + 4, String(hi), "axis-y num");
    if (lo !== hi) text(dims.padLeft - 4, scale.toY(lo) + 4, String(lo), "axis-y num");
  }
  if (labels.length) {
    text(dims.padLeft, dims.height - 4, labels[0] ?? "", "axis-x date", "start");
    text(dims.width, dims.height - 4, labels[labels.length - 1] ?? "", "axis-x date");
  }
}

/** "n zero days hidden" marker for log axes; n is the count of zero entries. */
export function appendZeroAnnotation(parent: HTMLElement, droppedZeros: number): void {
  if (droppedZeros <= 0) return;
  const note = document.createElement("p");
  note.className = "zero-note";
  note.setAttribute("data-zero-count", String(droppedZeros));
  note.textContent = `log scale: ${droppedZeros} zero-count day(s) hidden`;
  parent.appendChild(note);
}
