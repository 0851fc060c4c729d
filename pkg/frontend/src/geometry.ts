// Pure plane<->pixel geometry. Everything here is deterministic math with no
// DOM access, so the renderers stay testable in plain node.

import type { PlaneBounds } from "./api.js";

export interface Viewport {
  width: number;
  height: number;
  padding: number;
}

export type Xy = [number, number];

/** Affine map from model plane coordinates to canvas pixels (y flipped). */
export class PlaneTransform {
  readonly sx: number;
  readonly sy: number;

  constructor(
    readonly bounds: PlaneBounds,
    readonly view: Viewport,
  ) {
    const spanX = bounds.xmax - bounds.xmin || 1;
    const spanY = bounds.ymax - bounds.ymin || 1;
    this.sx = (view.width - 2 * view.padding) / spanX;
    this.sy = (view.height - 2 * view.padding) / spanY;
  }

  toPixel(p: Xy): Xy {
    return [
      this.view.padding + (p[0] - this.bounds.xmin) * this.sx,
      this.view.height - this.view.padding - (p[1] - this.bounds.ymin) * this.sy,
    ];
  }

  toPlane(px: Xy): Xy {
    return [
      this.bounds.xmin + (px[0] - this.view.padding) / this.sx,
      this.bounds.ymin + (this.view.height - this.view.padding - px[1]) / this.sy,
    ];
  }
}

/** Round trip sanity: toPlane(toPixel(p)) == p up to float rounding. */
export function distance(a: Xy, b: Xy): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}

/**
 * Index of the point within `radius` pixels of `px`, nearest first;
 * -1 when nothing is close enough. Ties go to the lower index.
 */
export function hitTest(
  positions: Xy[],
  transform: PlaneTransform,
  px: Xy,
  radius: number,
): number {
  let best = -1;
  let bestDist = radius;
  positions.forEach((p, i) => {
    const d = distance(transform.toPixel(p), px);
    if (d < bestDist) {
      best = i;
      bestDist = d;
    }
  });
  return best;
}

/** Total length of a polyline in whatever units its points are in. */
export function polylineLength(points: Xy[]): number {
  let total = 0;
  for (let i = 1; i < points.length; i++) total += distance(points[i - 1], points[i]);
  return total;
}

/** Clamp v into [lo, hi]. */
export function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}

/** Linear interpolation between a and b. */
export function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

/**
 * Point along an animation from `from` to `to` at progress t in [0, 1],
 * eased so the snap-back decelerates into the target.
 */
export function easeOut(from: Xy, to: Xy, t: number): Xy {
  const u = 1 - (1 - t) * (1 - t);
  return [lerp(from[0], to[0], u), lerp(from[1], to[1], u)];
}
