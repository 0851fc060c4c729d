// Feasibility overlay: the service's boolean grid becomes a smoothly
// interpolated grayscale raster. Darkness = infeasibility. Bilinear
// interpolation between cell centers keeps every center's value exact, so
// mask semantics survive the smoothing.

import type { FeasibilityResponse } from "./api.js";
import { clamp } from "./geometry.js";

export interface Raster {
  width: number;
  height: number;
  /** Per-pixel infeasibility in [0, 1]; 0 everywhere when all cells pass. */
  data: Float32Array;
}

/**
 * Sample the infeasibility field at a continuous cell-space coordinate.
 * Coordinates are in cell-center units: (0, 0) is the center of cell
 * [0][0]. Outside the center lattice the field clamps to the edge value.
 */
export function sampleField(mask: boolean[][], u: number, v: number): number {
  const nx = mask.length;
  const ny = mask[0].length;
  const cu = clamp(u, 0, nx - 1);
  const cv = clamp(v, 0, ny - 1);
  const i0 = Math.floor(cu);
  const j0 = Math.floor(cv);
  const i1 = Math.min(i0 + 1, nx - 1);
  const j1 = Math.min(j0 + 1, ny - 1);
  const fu = cu - i0;
  const fv = cv - j0;
  const f = (i: number, j: number) => (mask[i][j] ? 0 : 1);
  const top = f(i0, j0) * (1 - fu) + f(i1, j0) * fu;
  const bottom = f(i0, j1) * (1 - fu) + f(i1, j1) * fu;
  return top * (1 - fv) + bottom * fv;
}

/**
 * Rasterize a feasibility response to pixel intensities. Pixel (px, py)
 * maps to the plane point under it, which lands at fractional cell-center
 * coordinates; y is flipped (canvas grows downward, plane grows upward).
 */
export function rasterizeFeasibility(
  response: FeasibilityResponse,
  width: number,
  height: number,
): Raster {
  const [nx, ny] = response.resolution;
  const data = new Float32Array(width * height);
  for (let py = 0; py < height; py++) {
    // pixel center -> cell-center coordinate; multiply before dividing so a
    // raster aligned to the grid reproduces the mask bit-exactly at centers
    const v = ((height - (py + 0.5)) * ny) / height - 0.5;
    for (let px = 0; px < width; px++) {
      const u = ((px + 0.5) * nx) / width - 0.5;
      data[py * width + px] = sampleField(response.mask, u, v);
    }
  }
  return { width, height, data };
}

/** Pixel coordinates of a cell center inside a raster of the given size. */
export function cellCenterPixel(
  resolution: [number, number],
  cell: [number, number],
  width: number,
  height: number,
): [number, number] {
  const [nx, ny] = resolution;
  return [
    ((cell[0] + 0.5) * width) / nx - 0.5,
    ((ny - cell[1] - 0.5) * height) / ny - 0.5,
  ];
}

/** Blend the raster into RGBA bytes: transparent where feasible, dark gray otherwise. */
export function rasterToRgba(raster: Raster, maxAlpha = 160): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(new ArrayBuffer(raster.width * raster.height * 4));
  for (let i = 0; i < raster.data.length; i++) {
    const a = Math.round(raster.data[i] * maxAlpha);
    out[i * 4 + 0] = 20;
    out[i * 4 + 1] = 20;
    out[i * 4 + 2] = 20;
    out[i * 4 + 3] = a;
  }
  return out;
}

export function drawFeasibility(
  ctx: CanvasRenderingContext2D,
  response: FeasibilityResponse,
  width: number,
  height: number,
): void {
  const raster = rasterizeFeasibility(response, width, height);
  const image = new ImageData(rasterToRgba(raster), width, height);
  ctx.putImageData(image, 0, 0);
}
