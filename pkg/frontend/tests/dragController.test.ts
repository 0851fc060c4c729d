import { describe, expect, it } from "vitest";
import { SteerClient } from "../src/api.js";
import { DragController, type DragFrame } from "../src/dragController.js";
import type { Xy } from "../src/geometry.js";
import { MockPointService, TestClock, flushAsync } from "./helpers.js";

interface Rig {
  service: MockPointService;
  controller: DragController;
  frames: DragFrame[];
  snaps: { from: Xy; to: Xy }[];
  errors: unknown[];
  clock: TestClock;
}

function makeRig(options: {
  feasible?: (target: Xy) => boolean;
  intervalMs?: number;
  manual?: boolean;
} = {}): Rig {
  const service = new MockPointService([0.5, 0.5], options.feasible ?? (() => true));
  service.manual = options.manual ?? false;
  const frames: DragFrame[] = [];
  const snaps: { from: Xy; to: Xy }[] = [];
  const errors: unknown[] = [];
  const clock = new TestClock();
  const controller = new DragController(
    new SteerClient(service),
    "m1",
    "p",
    {
      onFrame: (frame) => frames.push(frame),
      onSnapBack: (from, to) => snaps.push({ from, to }),
      onError: (error) => errors.push(error),
    },
    {
      intervalMs: options.intervalMs ?? 1000 / 30,
      now: clock.now,
      schedule: clock.schedule,
      cancel: clock.cancel,
    },
  );
  return { service, controller, frames, snaps, errors, clock };
}

describe("DragController frames", () => {
  it("shows the cursor immediately, before any response lands", () => {
    const rig = makeRig({ manual: true });
    rig.controller.start([0.5, 0.5]);
    rig.controller.move([0.6, 0.7]);
    expect(rig.frames.length).toBe(1);
    expect(rig.frames[0].position).toEqual([0.6, 0.7]);
    expect(rig.frames[0].features).toBeNull(); // nothing solved yet
    expect(rig.frames[0].feasible).toBe(true); // optimistic until told otherwise
    rig.controller.dispose();
    rig.service.releaseAll();
  });

  it("carries solved features and feasibility into later frames", async () => {
    const rig = makeRig({ feasible: (t) => t[0] <= 1 });
    rig.controller.start([0.5, 0.5]);
    rig.controller.move([0.8, 0.5]);
    await flushAsync();
    rig.clock.advance(40);
    rig.controller.move([4, 4]); // out of the feasible half-plane
    await flushAsync();
    rig.clock.advance(40);
    rig.controller.move([4.1, 4]);
    const last = rig.frames[rig.frames.length - 1];
    expect(last.feasible).toBe(false);
    expect(last.violations.length).toBeGreaterThan(0);
    expect(last.features).toEqual(rig.service.solve([4, 4]));
    rig.controller.dispose();
  });

  it("ignores moves before start", () => {
    const rig = makeRig();
    rig.controller.move([1, 1]);
    expect(rig.frames).toEqual([]);
  });

  it("discards stale responses once a newer target is out", async () => {
    const rig = makeRig({ manual: true, intervalMs: 0 });
    rig.controller.start([0.5, 0.5]);
    rig.controller.move([5, 0.5]); // request 1 goes out and hangs
    rig.controller.move([0.9, 0.9]); // newer target queued
    rig.service.release(); // request 1 resolves late -> stale
    await flushAsync();
    rig.service.release(); // request 2 resolves
    await flushAsync();
    const featureFrames = rig.frames.filter((f) => f.features !== null);
    // the stale solve([5, 0.5]) never reaches a frame
    for (const frame of featureFrames) {
      expect(frame.features).toEqual(rig.service.solve([0.9, 0.9]));
    }
    expect(featureFrames.length).toBeGreaterThan(0);
    rig.controller.dispose();
  });

  it("routes service failures to onError", async () => {
    const rig = makeRig();
    rig.controller.start([0.5, 0.5]);
    const broken = rig.service.request.bind(rig.service);
    rig.service.request = async (method, path, body) => {
      if (path.endsWith("/backward")) throw new Error("down");
      return broken(method, path, body);
    };
    rig.controller.move([0.7, 0.7]);
    await flushAsync();
    expect(rig.errors.length).toBe(1);
    rig.controller.dispose();
  });
});

describe("DragController drop", () => {
  it("flushes the trailing sample so the final position always reaches the service", async () => {
    const rig = makeRig();
    rig.controller.start([0.5, 0.5]);
    rig.controller.move([0.6, 0.6]); // emitted immediately
    rig.clock.advance(5);
    rig.controller.move([0.7, 0.7]); // inside the interval: stashed
    rig.clock.advance(5);
    rig.controller.move([0.8, 0.9]); // replaces the stash
    const result = await rig.controller.drop();
    expect(result.sentTargets).toEqual([
      [0.6, 0.6],
      [0.8, 0.9],
    ]);
    expect(result.snappedBack).toBe(false);
    expect(result.position).toEqual([0.8, 0.9]);
    // every settled number came from the service, none were computed locally
    expect(result.features).toEqual(rig.service.solve([0.8, 0.9]));
    expect(rig.service.currentFeatures).toEqual(result.features);
  });

  it("settles on the server state frame after a feasible drop", async () => {
    const rig = makeRig();
    rig.controller.start([0.5, 0.5]);
    rig.controller.move([0.9, 0.4]);
    const result = await rig.controller.drop();
    const last = rig.frames[rig.frames.length - 1];
    expect(last.position).toEqual(result.position);
    expect(last.features).toEqual(result.features);
    expect(last.feasible).toBe(true);
    expect(rig.snaps).toEqual([]);
  });

  it("snaps back to the last feasible waypoint on an infeasible drop", async () => {
    const rig = makeRig({ feasible: (t) => t[0] <= 1 });
    rig.controller.start([0.5, 0.5]);
    rig.controller.move([0.8, 0.5]); // feasible, committed
    await flushAsync();
    rig.clock.advance(40);
    rig.controller.move([6, 6]); // infeasible, never committed
    await flushAsync();
    const result = await rig.controller.drop();
    expect(result.snappedBack).toBe(true);
    expect(result.position).toEqual([0.8, 0.5]);
    expect(result.features).toEqual(rig.service.solve([0.8, 0.5]));
    expect(rig.snaps).toEqual([{ from: [6, 6], to: [0.8, 0.5] }]);
    // final frame paints the snapped-back point as feasible again
    const last = rig.frames[rig.frames.length - 1];
    expect(last.position).toEqual([0.8, 0.5]);
    expect(last.feasible).toBe(true);
  });

  it("an entirely infeasible drag settles on the original position", async () => {
    const rig = makeRig({ feasible: () => false });
    rig.controller.start([0.5, 0.5]);
    rig.controller.move([3, 3]);
    await flushAsync();
    const result = await rig.controller.drop();
    expect(result.snappedBack).toBe(true);
    expect(result.position).toEqual([0.5, 0.5]);
    expect(result.features).toEqual(rig.service.originalFeatures);
    expect(rig.service.touched).toBe(false);
  });

  it("rejects a drop without a start", async () => {
    const rig = makeRig();
    await expect(rig.controller.drop()).rejects.toThrow("drop without start");
  });
});
