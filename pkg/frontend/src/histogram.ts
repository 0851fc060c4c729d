// Per-feature histogram with constraint handles. The bar layout and the
// handle-drag rules are pure; the app layer owns the actual input events.

import { clamp } from "./geometry.js";

export interface HistogramModel {
  xmin: number;
  xmax: number;
  counts: number[];
  binWidth: number;
}

export function buildHistogram(values: number[], bins = 20): HistogramModel {
  let xmin = Infinity;
  let xmax = -Infinity;
  for (const v of values) {
    if (v < xmin) xmin = v;
    if (v > xmax) xmax = v;
  }
  if (!isFinite(xmin)) {
    xmin = 0;
    xmax = 1;
  }
  const span = xmax - xmin || 1;
  const counts = new Array(bins).fill(0);
  for (const v of values) {
    const bin = Math.min(bins - 1, Math.floor(((v - xmin) / span) * bins));
    counts[bin] += 1;
  }
  return { xmin, xmax, counts, binWidth: span / bins };
}

export interface BoundHandles {
  /** Lower/upper bound values; null renders the handle parked at the edge. */
  lower: number | null;
  upper: number | null;
}

/**
 * Drag one bound handle to a new value. The handle is clamped to the data
 * range and never crosses the opposite handle.
 */
export function dragHandle(
  handles: BoundHandles,
  side: "lower" | "upper",
  value: number,
  model: HistogramModel,
): BoundHandles {
  const clamped = clamp(value, model.xmin, model.xmax);
  if (side === "lower") {
    const ceiling = handles.upper ?? model.xmax;
    return { ...handles, lower: Math.min(clamped, ceiling) };
  }
  const floor = handles.lower ?? model.xmin;
  return { ...handles, upper: Math.max(clamped, floor) };
}

/** Value -> horizontal pixel inside a histogram strip of the given width. */
export function valueToX(model: HistogramModel, value: number, width: number): number {
  const span = model.xmax - model.xmin || 1;
  return clamp(((value - model.xmin) / span) * width, 0, width);
}

export function xToValue(model: HistogramModel, x: number, width: number): number {
  const span = model.xmax - model.xmin || 1;
  return model.xmin + (clamp(x, 0, width) / width) * span;
}

export interface HistogramScene {
  bars: { x: number; width: number; height: number }[];
  /** Blue line marking the point's current value. */
  currentX: number;
  /** Cyan line marking the feature mean. */
  meanX: number;
  lowerHandleX: number;
  upperHandleX: number;
}

export function buildHistogramScene(
  model: HistogramModel,
  handles: BoundHandles,
  current: number,
  mean: number,
  width: number,
  height: number,
): HistogramScene {
  const peak = Math.max(1, ...model.counts);
  const barWidth = width / model.counts.length;
  return {
    bars: model.counts.map((count, i) => ({
      x: i * barWidth,
      width: barWidth,
      height: (count / peak) * height,
    })),
    currentX: valueToX(model, current, width),
    meanX: valueToX(model, mean, width),
    lowerHandleX: valueToX(model, handles.lower ?? model.xmin, width),
    upperHandleX: valueToX(model, handles.upper ?? model.xmax, width),
  };
}

export function drawHistogram(
  ctx: CanvasRenderingContext2D,
  scene: HistogramScene,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#d5dde6";
  for (const bar of scene.bars) {
    ctx.fillRect(bar.x, height - bar.height, bar.width - 1, bar.height);
  }
  ctx.strokeStyle = "#00a6c8"; // cyan mean line
  ctx.beginPath();
  ctx.moveTo(scene.meanX, 0);
  ctx.lineTo(scene.meanX, height);
  ctx.stroke();
  ctx.strokeStyle = "#2255cc"; // blue current-value line
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(scene.currentX, 0);
  ctx.lineTo(scene.currentX, height);
  ctx.stroke();
  ctx.lineWidth = 1;
  ctx.fillStyle = "#111";
  for (const hx of [scene.lowerHandleX, scene.upperHandleX]) {
    ctx.beginPath();
    ctx.moveTo(hx, height);
    ctx.lineTo(hx - 5, height + 8);
    ctx.lineTo(hx + 5, height + 8);
    ctx.closePath();
    ctx.fill();
  }
}
