// Application wiring: loads a CSV, fits a model, then connects the scatter,
// proline, histogram and feasibility panes to the service. All state shown
// anywhere comes from service responses.

import {
  ApiError,
  HttpTransport,
  SteerClient,
  type ConstraintDoc,
  type DatasetInfo,
  type FeasibilityResponse,
  type ModelInfo,
  type ProlinesResponse,
} from "./api.js";
import { DragController } from "./dragController.js";
import { PlaneTransform, easeOut, type Xy } from "./geometry.js";
import { drawFeasibility } from "./heatmap.js";
import {
  buildHistogram,
  buildHistogramScene,
  dragHandle,
  drawHistogram,
  xToValue,
  type BoundHandles,
} from "./histogram.js";
import { buildMarks, buildProlinePath, drawProlines } from "./prolines.js";
import { buildScatterScene, drawScatter, pickPoint, type ScatterInput } from "./scatter.js";
import {
  beginDrag,
  endDrag,
  initialViewState,
  selectPoint,
  setTopK,
  toggleHistogram,
  toggleOverlay,
  type ViewState,
} from "./viewState.js";

const WIDTH = 720;
const HEIGHT = 540;
const HIST_WIDTH = 220;
const HIST_HEIGHT = 56;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class App {
  private client: SteerClient;
  private view: ViewState = initialViewState();
  private dataset: DatasetInfo | null = null;
  private values: number[][] = [];
  private model: ModelInfo | null = null;
  private transform: PlaneTransform | null = null;
  private positions: Xy[] = [];
  private touched = new Set<string>();
  private currentFeatures: number[] | null = null;
  private constraints: ConstraintDoc = {};
  private prolines: ProlinesResponse | null = null;
  private feasibility: FeasibilityResponse | null = null;
  private drag: DragController | null = null;
  private dragFrame: { position: Xy; feasible: boolean } | null = null;
  private hoverId: string | null = null;

  private scatterCanvas = el<HTMLCanvasElement>("scatter");
  private overlayCanvas = el<HTMLCanvasElement>("overlay");
  private tooltip = el<HTMLDivElement>("tooltip");
  private panel = el<HTMLDivElement>("panel");
  private status = el<HTMLDivElement>("status");

  constructor(baseUrl: string) {
    this.client = new SteerClient(new HttpTransport(baseUrl));
    this.bindChrome();
  }

  private bindChrome(): void {
    el<HTMLInputElement>("file").addEventListener("change", (ev) => {
      const input = ev.target as HTMLInputElement;
      const file = input.files?.[0];
      if (file) void this.loadFile(file);
    });
    el<HTMLButtonElement>("fit").addEventListener("click", () => void this.fit());
    el<HTMLInputElement>("show-feasibility").addEventListener("change", () => {
      this.view = toggleOverlay(this.view);
      void this.refreshFeasibility();
    });
    const topk = el<HTMLInputElement>("topk");
    topk.addEventListener("change", () => {
      this.view = setTopK(this.view, Number(topk.value));
      void this.refreshProlines();
    });

    const canvas = this.overlayCanvas;
    canvas.addEventListener("pointermove", (ev) => this.onPointerMove(ev));
    canvas.addEventListener("pointerdown", (ev) => this.onPointerDown(ev));
    canvas.addEventListener("pointerup", (ev) => void this.onPointerUp(ev));
  }

  private async loadFile(file: File): Promise<void> {
    const text = await file.text();
    const idColumn = el<HTMLInputElement>("id-column").value.trim() || undefined;
    try {
      this.dataset = await this.client.uploadDataset(text, idColumn);
      this.status.textContent = `dataset ${this.dataset.dataset_id}: ${this.dataset.n} rows, ${this.dataset.d} features`;
    } catch (error) {
      this.report(error);
    }
  }

  private async fit(): Promise<void> {
    if (!this.dataset) return;
    const method = el<HTMLSelectElement>("method").value as "pca" | "autoencoder";
    try {
      this.model = await this.client.fitModel(this.dataset.dataset_id, method);
      const full = await this.client.dataset(this.dataset.dataset_id);
      this.values = full.values;
      this.transform = new PlaneTransform(this.model.plane_bounds, {
        width: WIDTH,
        height: HEIGHT,
        padding: 24,
      });
      this.positions = this.model.positions.map((p) => [p[0], p[1]] as Xy);
      this.touched = new Set();
      this.view = selectPoint(this.view, null);
      this.status.textContent = `model ${this.model.model_id} (${method})`;
      this.renderAll();
    } catch (error) {
      this.report(error);
    }
  }

  private scatterInput(): ScatterInput {
    return {
      ids: this.dataset?.ids ?? [],
      positions: this.positions,
      touched: this.touched,
      selected: this.view.selectedPoint,
      drag: this.dragFrame,
    };
  }

  private onPointerMove(ev: PointerEvent): void {
    if (!this.transform || !this.dataset) return;
    const px: Xy = [ev.offsetX, ev.offsetY];
    if (this.drag?.dragging) {
      this.drag.move(this.transform.toPlane(px));
      return;
    }
    const id = pickPoint(this.scatterInput(), this.transform, px);
    if (id !== this.hoverId) {
      this.hoverId = id;
      this.tooltip.style.display = id ? "block" : "none";
      if (id) {
        this.tooltip.textContent = id;
        this.tooltip.style.left = `${ev.offsetX + 12}px`;
        this.tooltip.style.top = `${ev.offsetY - 8}px`;
      }
    }
  }

  private onPointerDown(ev: PointerEvent): void {
    if (!this.transform || !this.model || !this.dataset) return;
    const px: Xy = [ev.offsetX, ev.offsetY];
    const id = pickPoint(this.scatterInput(), this.transform, px);
    this.view = selectPoint(this.view, id);
    if (id) {
      const index = this.dataset.ids.indexOf(id);
      this.view = beginDrag(this.view, this.positions[index]);
      this.drag = new DragController(this.client, this.model.model_id, id, {
        onFrame: (frame) => {
          this.dragFrame = { position: frame.position, feasible: frame.feasible };
          if (frame.features) this.currentFeatures = frame.features;
          this.renderScatter();
        },
        onSnapBack: (from, to) => this.animateSnap(from, to),
        onError: (error) => this.report(error),
      });
      this.drag.start(this.positions[index]);
      this.overlayCanvas.setPointerCapture(ev.pointerId);
      void this.loadSelection(id);
    } else {
      void this.loadSelection(null);
    }
    this.renderAll();
  }

  private async onPointerUp(ev: PointerEvent): Promise<void> {
    if (!this.drag?.dragging || !this.transform || !this.dataset) return;
    this.drag.move(this.transform.toPlane([ev.offsetX, ev.offsetY]));
    try {
      const result = await this.drag.drop();
      const id = this.view.selectedPoint;
      if (id) {
        const index = this.dataset.ids.indexOf(id);
        this.positions[index] = result.position;
        this.touched.add(id);
        this.currentFeatures = result.features;
      }
    } catch (error) {
      this.report(error);
    } finally {
      this.view = endDrag(this.view);
      this.dragFrame = null;
      this.drag = null;
      await this.refreshProlines();
      this.renderAll();
      this.renderPanel();
    }
  }

  private animateSnap(from: Xy, to: Xy): void {
    const started = performance.now();
    const duration = 220;
    const step = (now: number): void => {
      const t = Math.min(1, (now - started) / duration);
      this.dragFrame = { position: easeOut(from, to, t), feasible: true };
      this.renderScatter();
      if (t < 1) requestAnimationFrame(step);
      else this.dragFrame = null;
    };
    requestAnimationFrame(step);
  }

  private async loadSelection(id: string | null): Promise<void> {
    if (!id || !this.model) {
      this.panel.style.display = "none";
      this.prolines = null;
      this.renderAll();
      return;
    }
    this.panel.style.display = "block";
    try {
      const state = await this.client.state(this.model.model_id, id);
      this.currentFeatures = state.features;
      this.constraints = state.constraints;
      await this.refreshProlines();
      await this.refreshFeasibility();
      this.renderPanel();
    } catch (error) {
      this.report(error);
    }
  }

  private async refreshProlines(): Promise<void> {
    if (!this.model || !this.view.selectedPoint) return;
    this.prolines = await this.client.prolines(
      this.model.model_id,
      this.view.selectedPoint,
      this.view.prolineTopK,
    );
    this.renderScatter();
  }

  private async refreshFeasibility(): Promise<void> {
    if (!this.model || !this.view.selectedPoint || !this.view.feasibilityOverlay) {
      this.feasibility = null;
      this.renderAll();
      return;
    }
    this.feasibility = await this.client.feasibility(this.model.model_id, this.view.selectedPoint);
    this.renderAll();
  }

  private renderAll(): void {
    const ctx = this.scatterCanvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, WIDTH, HEIGHT);
    if (this.feasibility) drawFeasibility(ctx, this.feasibility, WIDTH, HEIGHT);
    this.renderScatter();
  }

  private renderScatter(): void {
    if (!this.transform) return;
    const ctx = this.overlayCanvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, WIDTH, HEIGHT);
    if (this.prolines) {
      const paths = this.prolines.prolines.map((p) => buildProlinePath(p, this.transform!));
      const marks = buildMarks(this.prolines.marks, this.transform);
      drawProlines(ctx, paths, marks, this.dragFrame ? !this.dragFrame.feasible : false);
    }
    drawScatter(ctx, buildScatterScene(this.scatterInput(), this.transform));
  }

  private renderPanel(): void {
    if (!this.dataset || !this.model || !this.view.selectedPoint || !this.currentFeatures) return;
    const id = this.view.selectedPoint;
    const body = el<HTMLTableSectionElement>("feature-rows");
    body.innerHTML = "";
    this.dataset.feature_names.forEach((name, j) => {
      const row = document.createElement("tr");
      const label = document.createElement("td");
      label.textContent = name;
      row.appendChild(label);

      const valueCell = document.createElement("td");
      const input = document.createElement("input");
      input.type = "number";
      input.step = "any";
      input.value = String(this.currentFeatures![j]);
      input.addEventListener("change", () => void this.editFeature(id, name, Number(input.value)));
      valueCell.appendChild(input);
      row.appendChild(valueCell);

      const buttons = document.createElement("td");
      const lock = document.createElement("button");
      const locked = Boolean(this.constraints[name]?.locked);
      lock.textContent = locked ? "unlock" : "lock";
      lock.addEventListener("click", () => void this.toggleLock(id, name, j));
      buttons.appendChild(lock);
      const expand = document.createElement("button");
      expand.textContent = "hist";
      expand.addEventListener("click", () => {
        this.view = toggleHistogram(this.view, name);
        this.renderPanel();
      });
      buttons.appendChild(expand);
      row.appendChild(buttons);
      body.appendChild(row);

      if (this.view.expandedHistograms.has(name)) {
        const histRow = document.createElement("tr");
        const cell = document.createElement("td");
        cell.colSpan = 3;
        cell.appendChild(this.buildHistogramCell(id, name, j));
        histRow.appendChild(cell);
        body.appendChild(histRow);
      }
    });

    el<HTMLButtonElement>("reset-point").onclick = () => void this.resetPoint(id);
  }

  private buildHistogramCell(id: string, name: string, j: number): HTMLCanvasElement {
    const canvas = document.createElement("canvas");
    canvas.width = HIST_WIDTH;
    canvas.height = HIST_HEIGHT + 10;
    const model = buildHistogram(this.values.map((row) => row[j]));
    let handles: BoundHandles = {
      lower: this.constraints[name]?.lower ?? null,
      upper: this.constraints[name]?.upper ?? null,
    };
    const stats = this.dataset!.stats[j];
    const render = (): void => {
      const ctx = canvas.getContext("2d");
      if (!ctx) return;
      const scene = buildHistogramScene(
        model,
        handles,
        this.currentFeatures![j],
        stats.mean,
        HIST_WIDTH,
        HIST_HEIGHT,
      );
      drawHistogram(ctx, scene, HIST_WIDTH, HIST_HEIGHT);
    };
    let active: "lower" | "upper" | null = null;
    canvas.addEventListener("pointerdown", (ev) => {
      const value = xToValue(model, ev.offsetX, HIST_WIDTH);
      const mid = (handles.lower ?? model.xmin) / 2 + (handles.upper ?? model.xmax) / 2;
      active = value <= mid ? "lower" : "upper";
      canvas.setPointerCapture(ev.pointerId);
    });
    canvas.addEventListener("pointermove", (ev) => {
      if (!active) return;
      handles = dragHandle(handles, active, xToValue(model, ev.offsetX, HIST_WIDTH), model);
      render();
    });
    canvas.addEventListener("pointerup", () => {
      if (!active) return;
      active = null;
      const doc: ConstraintDoc = { ...this.constraints };
      doc[name] = { ...doc[name] };
      if (handles.lower !== null && handles.lower > model.xmin) doc[name].lower = handles.lower;
      else delete doc[name].lower;
      if (handles.upper !== null && handles.upper < model.xmax) doc[name].upper = handles.upper;
      else delete doc[name].upper;
      if (Object.keys(doc[name]).length === 0) delete doc[name];
      void this.putConstraints(id, doc);
    });
    render();
    return canvas;
  }

  private async editFeature(id: string, name: string, value: number): Promise<void> {
    if (!this.model || !this.dataset) return;
    try {
      const response = await this.client.forward(this.model.model_id, id, { [name]: value });
      const index = this.dataset.ids.indexOf(id);
      this.positions[index] = response.position;
      this.touched.add(id);
      const state = await this.client.state(this.model.model_id, id);
      this.currentFeatures = state.features;
      await this.refreshProlines();
      this.renderAll();
      this.renderPanel();
    } catch (error) {
      this.report(error);
    }
  }

  private async toggleLock(id: string, name: string, j: number): Promise<void> {
    const doc: ConstraintDoc = { ...this.constraints };
    if (doc[name]?.locked) {
      doc[name] = { ...doc[name] };
      delete doc[name].locked;
      delete doc[name].lock_value;
      if (Object.keys(doc[name]).length === 0) delete doc[name];
    } else {
      doc[name] = { ...doc[name], locked: true, lock_value: this.currentFeatures![j] };
    }
    await this.putConstraints(id, doc);
  }

  private async putConstraints(id: string, doc: ConstraintDoc): Promise<void> {
    if (!this.model) return;
    try {
      await this.client.putConstraints(this.model.model_id, id, doc);
      this.constraints = doc;
      await this.refreshFeasibility();
      this.renderPanel();
    } catch (error) {
      this.report(error);
    }
  }

  private async resetPoint(id: string): Promise<void> {
    if (!this.model || !this.dataset) return;
    try {
      const response = await this.client.reset(this.model.model_id, id);
      const index = this.dataset.ids.indexOf(id);
      this.positions[index] = response.position;
      this.touched.delete(id);
      this.currentFeatures = response.features;
      await this.refreshProlines();
      this.renderAll();
      this.renderPanel();
    } catch (error) {
      this.report(error);
    }
  }

  private report(error: unknown): void {
    if (error instanceof ApiError) {
      this.status.textContent = `error ${error.status} ${error.code}: ${error.message}`;
    } else {
      this.status.textContent = String(error);
    }
  }
}

declare global {
  interface Window {
    app: App;
  }
}

window.app = new App(
  new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8000",
);
