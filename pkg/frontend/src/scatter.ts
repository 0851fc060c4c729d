// Scatter pane: dots for every point, hover id, selection ring, drag ghost.
// Scene building is pure; only draw() touches a canvas context.

import type { PlaneTransform, Xy } from "./geometry.js";
import { hitTest } from "./geometry.js";

export interface ScatterStyle {
  dotRadius: number;
  dotColor: string;
  touchedColor: string;
  selectedColor: string;
  infeasibleColor: string;
}

export const DEFAULT_SCATTER_STYLE: ScatterStyle = {
  dotRadius: 5,
  dotColor: "#4878b0",
  touchedColor: "#e09c3b",
  selectedColor: "#d0342c",
  infeasibleColor: "#000000",
};

export interface DotPrimitive {
  id: string;
  px: Xy;
  radius: number;
  color: string;
  ring: boolean;
}

export interface ScatterInput {
  ids: string[];
  positions: Xy[];
  touched: Set<string>;
  selected: string | null;
  /** Mid-drag override for the selected point: cursor position + feasibility. */
  drag?: { position: Xy; feasible: boolean } | null;
}

export function buildScatterScene(
  input: ScatterInput,
  transform: PlaneTransform,
  style: ScatterStyle = DEFAULT_SCATTER_STYLE,
): DotPrimitive[] {
  return input.ids.map((id, i) => {
    const isSelected = id === input.selected;
    let position = input.positions[i];
    let color = input.touched.has(id) ? style.touchedColor : style.dotColor;
    if (isSelected) color = style.selectedColor;
    if (isSelected && input.drag) {
      position = input.drag.position;
      if (!input.drag.feasible) color = style.infeasibleColor;
    }
    return {
      id,
      px: transform.toPixel(position),
      radius: isSelected ? style.dotRadius + 2 : style.dotRadius,
      color,
      ring: isSelected,
    };
  });
}

/** Id of the dot under the pointer, or null. */
export function pickPoint(
  input: ScatterInput,
  transform: PlaneTransform,
  px: Xy,
  radius = 9,
): string | null {
  const positions = input.ids.map((id, i) =>
    id === input.selected && input.drag ? input.drag.position : input.positions[i],
  );
  const hit = hitTest(positions, transform, px, radius);
  return hit < 0 ? null : input.ids[hit];
}

export function drawScatter(ctx: CanvasRenderingContext2D, scene: DotPrimitive[]): void {
  for (const dot of scene) {
    ctx.beginPath();
    ctx.arc(dot.px[0], dot.px[1], dot.radius, 0, 2 * Math.PI);
    ctx.fillStyle = dot.color;
    ctx.fill();
    if (dot.ring) {
      ctx.lineWidth = 2;
      ctx.strokeStyle = "#222";
      ctx.stroke();
    }
  }
}
