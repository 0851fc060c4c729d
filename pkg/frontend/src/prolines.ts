// Proline pane: each selected-point proline becomes a polyline with a mean
// circle, sigma arrows, green/red correlation segments and a projection
// mark. A single-sample proline degenerates to a dot.

import type { ProjectionMark, ProlineJson } from "./api.js";
import type { PlaneTransform, Xy } from "./geometry.js";

export interface ProlinePath {
  featureIndex: number;
  featureName: string;
  /** Pixel polyline; length 1 when the feature is constant. */
  path: Xy[];
  meanPx: Xy;
  sigmaLoPx: Xy | null;
  sigmaHiPx: Xy | null;
  currentPx: Xy;
  /** Pixel sub-polylines sliced from path by the service's index ranges. */
  greenSegment: Xy[] | null;
  redSegment: Xy[] | null;
}

export interface MarkPrimitive {
  featureIndex: number;
  px: Xy;
  /** +1 green (value increased), -1 red (decreased), 0 neutral gray. */
  direction: number;
}

function slice(path: Xy[], range: [number, number] | null): Xy[] | null {
  if (!range) return null;
  const [a, b] = range;
  return path.slice(a, b + 1);
}

export function buildProlinePath(p: ProlineJson, transform: PlaneTransform): ProlinePath {
  const path = p.samples.map((s) => transform.toPixel(s.position));
  return {
    featureIndex: p.feature_index,
    featureName: p.feature_name,
    path,
    meanPx: path[p.mean_index],
    sigmaLoPx: p.sigma_lo_index === null ? null : path[p.sigma_lo_index],
    sigmaHiPx: p.sigma_hi_index === null ? null : path[p.sigma_hi_index],
    currentPx: path[p.current_index],
    greenSegment: slice(path, p.green_range),
    redSegment: slice(path, p.red_range),
  };
}

export function buildMarks(marks: ProjectionMark[], transform: PlaneTransform): MarkPrimitive[] {
  return marks.map((m) => ({
    featureIndex: m.feature_index,
    px: transform.toPixel(m.position),
    direction: m.direction,
  }));
}

export function markColor(direction: number, infeasible = false): string {
  if (infeasible) return "#000000";
  if (direction > 0) return "#2e8b57";
  if (direction < 0) return "#c03a2b";
  return "#9a9a9a";
}

function strokePolyline(ctx: CanvasRenderingContext2D, pts: Xy[]): void {
  ctx.beginPath();
  ctx.moveTo(pts[0][0], pts[0][1]);
  for (let i = 1; i < pts.length; i++) ctx.lineTo(pts[i][0], pts[i][1]);
  ctx.stroke();
}

export function drawProlines(
  ctx: CanvasRenderingContext2D,
  paths: ProlinePath[],
  marks: MarkPrimitive[],
  infeasible = false,
): void {
  for (const p of paths) {
    if (p.path.length === 1) {
      // constant feature: the whole sweep collapses to one spot
      ctx.beginPath();
      ctx.arc(p.path[0][0], p.path[0][1], 2.5, 0, 2 * Math.PI);
      ctx.fillStyle = "#8fb6d9";
      ctx.fill();
      continue;
    }
    ctx.lineWidth = 1.5;
    ctx.strokeStyle = "#b9cfe4";
    strokePolyline(ctx, p.path);
    ctx.lineWidth = 3;
    if (p.greenSegment && p.greenSegment.length > 1) {
      ctx.strokeStyle = "#2e8b57";
      strokePolyline(ctx, p.greenSegment);
    }
    if (p.redSegment && p.redSegment.length > 1) {
      ctx.strokeStyle = "#c03a2b";
      strokePolyline(ctx, p.redSegment);
    }
    // light-blue mean circle
    ctx.beginPath();
    ctx.arc(p.meanPx[0], p.meanPx[1], 4, 0, 2 * Math.PI);
    ctx.fillStyle = "#7ec3e8";
    ctx.fill();
    for (const sigma of [p.sigmaLoPx, p.sigmaHiPx]) {
      if (!sigma) continue;
      ctx.beginPath();
      ctx.arc(sigma[0], sigma[1], 2.5, 0, 2 * Math.PI);
      ctx.fillStyle = "#5a8db8";
      ctx.fill();
    }
  }
  for (const m of marks) {
    ctx.beginPath();
    ctx.moveTo(m.px[0], m.px[1] - 5);
    ctx.lineTo(m.px[0] - 4, m.px[1] + 3);
    ctx.lineTo(m.px[0] + 4, m.px[1] + 3);
    ctx.closePath();
    ctx.fillStyle = markColor(m.direction, infeasible);
    ctx.fill();
  }
}
