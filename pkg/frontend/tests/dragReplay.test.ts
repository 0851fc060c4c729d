// End-to-end replay against a real service process. A recorded pointer trace
// driven through the DragController (throttle, latest-wins, trailing flush,
// drop settlement) must land on exactly the same final feature values as
// posting the same positions one by one straight to the backward endpoint.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { HttpTransport, SteerClient, type ConstraintDoc } from "../src/api.js";
import { DragController } from "../src/dragController.js";
import type { Xy } from "../src/geometry.js";
import { TestClock, seededRng } from "./helpers.js";

const PORT = 8700 + (process.pid % 150);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let serverLog = "";
let client: SteerClient;
let modelId = "";
let ids: string[] = [];
let positions: Xy[] = [];
let featureNames: string[] = [];

function buildCsv(): string {
  const rand = seededRng(401);
  const lines = ["name,alpha,beta,gamma,delta"];
  for (let i = 0; i < 12; i++) {
    const alpha = (10 + 40 * rand()).toFixed(6);
    const beta = (-5 + 10 * rand()).toFixed(6);
    const gamma = (100 + 5 * rand()).toFixed(6);
    const delta = rand().toFixed(6);
    lines.push(`r${String(i).padStart(2, "0")},${alpha},${beta},${gamma},${delta}`);
  }
  return lines.join("\n") + "\n";
}

async function waitForServer(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      await fetch(`${BASE}/datasets/warmup-probe`);
      return; // any HTTP answer (even a 404) means the service is up
    } catch {
      if (Date.now() > deadline) {
        throw new Error(`service did not come up on ${BASE}\n${serverLog}`);
      }
      await new Promise((resolve) => setTimeout(resolve, 150));
    }
  }
}

function maxAbsDiff(a: number[], b: number[]): number {
  expect(a.length).toBe(b.length);
  let worst = 0;
  for (let i = 0; i < a.length; i++) worst = Math.max(worst, Math.abs(a[i] - b[i]));
  return worst;
}

/** Drive a recorded trace through the controller with a virtual pointer clock. */
async function replayThroughUi(pointId: string, trace: Xy[], dtMs: number) {
  const clock = new TestClock();
  const snaps: { from: Xy; to: Xy }[] = [];
  const controller = new DragController(
    client,
    modelId,
    pointId,
    {
      onFrame: () => {},
      onSnapBack: (from, to) => snaps.push({ from, to }),
      onError: (error) => {
        throw error;
      },
    },
    { now: clock.now, schedule: clock.schedule, cancel: clock.cancel },
  );
  controller.start(trace[0]);
  for (const sample of trace) {
    controller.move(sample);
    clock.advance(dtMs);
  }
  const result = await controller.drop();
  controller.dispose();
  return { result, snaps };
}

/** The scripted variant: every sample straight to the backward endpoint. */
async function replayDirect(pointId: string, trace: Xy[]) {
  for (const sample of trace) {
    await client.backward(modelId, pointId, sample);
  }
  return client.state(modelId, pointId);
}

beforeAll(async () => {
  server = spawn("drsteer", ["serve", "--port", String(PORT), "--log-level", "warning"], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  server.stdout?.on("data", (chunk) => (serverLog += chunk));
  server.stderr?.on("data", (chunk) => (serverLog += chunk));
  await waitForServer(40_000);

  client = new SteerClient(new HttpTransport(BASE));
  const dataset = await client.uploadDataset(buildCsv(), "name");
  featureNames = dataset.feature_names;
  const model = await client.fitModel(dataset.dataset_id, "pca");
  modelId = model.model_id;
  positions = model.positions;
  ids = dataset.ids;
}, 60_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("drag replay equivalence", () => {
  it(
    "a throttled drag and scripted backward calls produce the same final features",
    async () => {
      const pointId = ids[3];
      const own = positions[3];
      const far: Xy = [own[0] + 1.5, own[1] - 1.1];
      // 25 pointer samples at 8 ms: well above 30 Hz, so the gate must drop some
      const trace: Xy[] = [];
      for (let i = 0; i < 25; i++) {
        const t = i / 24;
        const wiggle = 0.08 * Math.sin(t * Math.PI * 3);
        trace.push([
          own[0] + (far[0] - own[0]) * t - wiggle,
          own[1] + (far[1] - own[1]) * t + wiggle,
        ]);
      }

      const { result, snaps } = await replayThroughUi(pointId, trace, 8);
      expect(result.snappedBack).toBe(false);
      expect(snaps).toEqual([]);
      // the throttle really thinned the stream, yet the last sample got through
      expect(result.sentTargets.length).toBeLessThan(trace.length);
      expect(result.sentTargets[result.sentTargets.length - 1]).toEqual(trace[trace.length - 1]);

      await client.reset(modelId, pointId);
      const direct = await replayDirect(pointId, trace);

      expect(maxAbsDiff(result.features, direct.features)).toBeLessThanOrEqual(1e-9);
      expect(maxAbsDiff(result.position, direct.position)).toBeLessThanOrEqual(1e-9);

      await client.reset(modelId, pointId);
    },
    30_000,
  );

  it(
    "an infeasible drop snaps back to the last feasible waypoint in both replays",
    async () => {
      const pointId = ids[7];
      const own = positions[7];
      const state = await client.state(modelId, pointId);

      // lock every feature at its current value: only the point's own
      // projection stays feasible, so any real displacement is infeasible
      const locks: ConstraintDoc = {};
      featureNames.forEach((name, i) => {
        locks[name] = { locked: true, lock_value: state.features[i] };
      });
      await client.putConstraints(modelId, pointId, locks);

      // feasible prefix holds still at the own position, then marches away;
      // 40 ms steps exceed the gate interval so every waypoint is emitted,
      // including the last feasible one
      const trace: Xy[] = [own, own, own];
      for (let i = 1; i <= 12; i++) {
        trace.push([own[0] + 0.2 * i, own[1] + 0.15 * i]);
      }

      const { result, snaps } = await replayThroughUi(pointId, trace, 40);
      expect(result.snappedBack).toBe(true);
      expect(snaps.length).toBe(1);
      expect(maxAbsDiff(snaps[0].to, result.position)).toBeLessThanOrEqual(1e-12);
      // settled exactly where the drag was last feasible: the own position
      expect(maxAbsDiff(result.position, own)).toBeLessThanOrEqual(1e-9);
      expect(maxAbsDiff(result.features, state.features)).toBeLessThanOrEqual(1e-9);

      // reset clears the whole working copy, constraints included, so the
      // scripted replay re-applies the same locks before sending the trace
      await client.reset(modelId, pointId);
      await client.putConstraints(modelId, pointId, locks);
      const direct = await replayDirect(pointId, trace);
      expect(maxAbsDiff(result.features, direct.features)).toBeLessThanOrEqual(1e-9);
      expect(maxAbsDiff(result.position, direct.position)).toBeLessThanOrEqual(1e-9);

      // the service reports the snap target on the infeasible responses too
      const lastResponse = await client.backward(modelId, pointId, trace[trace.length - 1]);
      expect(lastResponse.position_feasible).toBe(false);
      expect(maxAbsDiff(lastResponse.snapped_position, own)).toBeLessThanOrEqual(1e-9);

      await client.reset(modelId, pointId);
    },
    30_000,
  );
});
