// Shared test doubles: a virtual clock for the rate gate, a scriptable
// transport, and an in-memory service double implementing the documented
// working-copy contract for drag tests that never touch the network.

import type { BackwardResponse, PointStateResponse, ResetResponse, Transport } from "../src/api.js";

/** Small deterministic RNG (mulberry32) for property-style loops. */
export function seededRng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let z = state;
    z = Math.imul(z ^ (z >>> 15), z | 1);
    z ^= z + Math.imul(z ^ (z >>> 7), z | 61);
    return ((z ^ (z >>> 14)) >>> 0) / 4294967296;
  };
}

export class TestClock {
  private t = 0;
  private timers: { at: number; fn: () => void; id: number }[] = [];
  private nextId = 1;

  now = (): number => this.t;

  schedule = (fn: () => void, ms: number): unknown => {
    const id = this.nextId++;
    this.timers.push({ at: this.t + ms, fn, id });
    return id;
  };

  cancel = (handle: unknown): void => {
    this.timers = this.timers.filter((timer) => timer.id !== handle);
  };

  advance(ms: number): void {
    const target = this.t + ms;
    for (;;) {
      const due = this.timers.filter((timer) => timer.at <= target);
      if (due.length === 0) break;
      due.sort((a, b) => a.at - b.at);
      const next = due[0];
      this.timers = this.timers.filter((timer) => timer.id !== next.id);
      this.t = next.at;
      next.fn();
    }
    this.t = target;
  }
}

/** Microtask settle: lets queued promise callbacks run. */
export async function flushAsync(rounds = 5): Promise<void> {
  for (let i = 0; i < rounds; i++) await new Promise((resolve) => setTimeout(resolve, 0));
}

export interface RequestLogEntry {
  method: string;
  path: string;
  body: unknown;
}

/**
 * Service double for one point on one model. Positions map to features
 * through an arbitrary fixed rule (x10), and feasibility is a pluggable
 * predicate, which is all the drag pipeline can observe through the API.
 */
export class MockPointService implements Transport {
  log: RequestLogEntry[] = [];
  /** When set, backward responses wait until release() is called. */
  manual = false;
  private waiting: (() => void)[] = [];

  originalFeatures: number[];
  originalPosition: [number, number];
  currentFeatures: number[];
  lastFeasible: [number, number];
  touched = false;

  constructor(
    origin: [number, number] = [0.5, 0.5],
    public feasible: (target: [number, number]) => boolean = () => true,
  ) {
    this.originalPosition = [...origin] as [number, number];
    this.originalFeatures = this.solve(origin);
    this.currentFeatures = [...this.originalFeatures];
    this.lastFeasible = [...origin] as [number, number];
  }

  solve(target: [number, number]): number[] {
    return [target[0] * 10, target[1] * 10];
  }

  release(): void {
    const next = this.waiting.shift();
    if (next) next();
  }

  releaseAll(): void {
    while (this.waiting.length > 0) this.release();
  }

  get pendingCount(): number {
    return this.waiting.length;
  }

  async request(method: string, path: string, body?: unknown): Promise<unknown> {
    this.log.push({ method, path, body });
    if (path.endsWith("/backward")) {
      if (this.manual) {
        await new Promise<void>((resolve) => this.waiting.push(resolve));
      }
      const target = (body as { target_position: [number, number] }).target_position;
      const ok = this.feasible(target);
      const features = this.solve(target);
      if (ok) {
        this.currentFeatures = features;
        this.lastFeasible = [...target] as [number, number];
        this.touched = true;
      }
      const response: BackwardResponse = {
        point_id: (body as { point_id: string }).point_id,
        features,
        position_feasible: ok,
        residual: ok ? 0 : 1,
        snapped_position: ok ? ([...target] as [number, number]) : [...this.lastFeasible] as [number, number],
        violations: ok ? [] : [{ feature: 0, kind: "lock", value: 0, limit: 0 }],
      };
      return response;
    }
    if (path.includes("/state")) {
      const response: PointStateResponse = {
        point_id: "p",
        touched: this.touched,
        features: [...this.currentFeatures],
        position: [...this.lastFeasible] as [number, number],
        original_features: [...this.originalFeatures],
        original_position: [...this.originalPosition] as [number, number],
        constraints: {},
      };
      return response;
    }
    if (path.endsWith("/reset")) {
      this.currentFeatures = [...this.originalFeatures];
      this.lastFeasible = [...this.originalPosition] as [number, number];
      this.touched = false;
      const response: ResetResponse = {
        point_id: "p",
        features: [...this.currentFeatures],
        position: [...this.lastFeasible] as [number, number],
      };
      return response;
    }
    throw new Error(`mock has no route for ${method} ${path}`);
  }
}

/** Transport that records calls and replays canned responses by route suffix. */
export class RecordingTransport implements Transport {
  log: RequestLogEntry[] = [];

  constructor(private responses: Record<string, unknown> = {}) {}

  async request(method: string, path: string, body?: unknown): Promise<unknown> {
    this.log.push({ method, path, body });
    for (const [suffix, response] of Object.entries(this.responses)) {
      if (path.includes(suffix)) return structuredClone(response);
    }
    return null;
  }
}
