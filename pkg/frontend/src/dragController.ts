// Turns a raw pointer stream into throttled backward-projection calls and
// resolves the drop, including the snap-back to the last feasible position.
// The controller never computes feature values or positions itself: while a
// drag runs the cursor target is shown verbatim, every number that sticks
// comes from a service response.

import type { BackwardResponse, SteerClient, ConstraintViolation } from "./api.js";
import type { Xy } from "./geometry.js";
import { LatestWins, RateGate, type RateGateOptions } from "./throttle.js";

export interface DragFrame {
  /** Where to draw the point right now (cursor while dragging). */
  position: Xy;
  /** Latest solved feature values from the service. */
  features: number[] | null;
  /** False turns the point and its projection marks black. */
  feasible: boolean;
  violations: ConstraintViolation[];
}

export interface DropResult {
  position: Xy;
  features: number[];
  snappedBack: boolean;
  /** Positions actually sent to the service, in order (for diagnostics). */
  sentTargets: Xy[];
}

export interface DragCallbacks {
  onFrame(frame: DragFrame): void;
  /** Fired on an infeasible drop with the path endpoints for the animation. */
  onSnapBack?(from: Xy, to: Xy): void;
  onError?(error: unknown): void;
}

export class DragController {
  private gate: RateGate<Xy>;
  private pipe: LatestWins<Xy, BackwardResponse>;
  private lastResponse: BackwardResponse | null = null;
  private cursor: Xy | null = null;
  private active = false;
  private sent: Xy[] = [];

  constructor(
    private readonly client: SteerClient,
    private readonly modelId: string,
    private readonly pointId: string,
    private readonly callbacks: DragCallbacks,
    gateOptions: RateGateOptions = {},
  ) {
    this.gate = new RateGate<Xy>((target) => {
      this.sent.push(target);
      this.pipe.submit(target);
    }, gateOptions);
    this.pipe = new LatestWins<Xy, BackwardResponse>(
      (target) => this.client.backward(this.modelId, this.pointId, [target[0], target[1]]),
      (response, _generation, isNewest) => {
        if (!isNewest) return; // stale response, a newer target is already out
        this.lastResponse = response;
        if (this.active && this.cursor) {
          this.callbacks.onFrame({
            position: this.cursor,
            features: response.features,
            feasible: response.position_feasible,
            violations: response.violations,
          });
        }
      },
      (error) => this.callbacks.onError?.(error),
    );
  }

  get dragging(): boolean {
    return this.active;
  }

  start(at: Xy): void {
    this.active = true;
    this.cursor = at;
    this.lastResponse = null;
    this.sent = [];
  }

  /** One pointer sample. Shows the cursor immediately, asks the service at most at 30 Hz. */
  move(target: Xy): void {
    if (!this.active) return;
    this.cursor = target;
    this.callbacks.onFrame({
      position: target,
      features: this.lastResponse?.features ?? null,
      feasible: this.lastResponse?.position_feasible ?? true,
      violations: this.lastResponse?.violations ?? [],
    });
    this.gate.push(target);
  }

  /**
   * Pointer-up. Flushes the trailing sample, waits for the service, then
   * settles on the server's view of the point: the working copy when the
   * drop was feasible, the last feasible position (snap-back) otherwise.
   */
  async drop(): Promise<DropResult> {
    if (!this.active) throw new Error("drop without start");
    this.gate.flush();
    await this.pipe.idle();
    this.active = false;

    const settled = await this.client.state(this.modelId, this.pointId);
    const snappedBack =
      this.lastResponse !== null && !this.lastResponse.position_feasible;
    if (snappedBack && this.cursor) {
      this.callbacks.onSnapBack?.(this.cursor, settled.position);
    }
    this.callbacks.onFrame({
      position: settled.position,
      features: settled.features,
      feasible: true,
      violations: [],
    });
    return {
      position: settled.position,
      features: settled.features,
      snappedBack,
      sentTargets: this.sent,
    };
  }

  dispose(): void {
    this.gate.dispose();
    this.active = false;
  }
}
