// Rate limiting for the drag stream. Two cooperating pieces:
//
//  - RateGate spaces emissions at most once per interval (30 Hz default)
//    with a trailing-edge flush, so the final pointer sample always gets
//    emitted even if it arrived mid-interval.
//  - LatestWins keeps at most one request in flight and remembers only the
//    newest pending value; stale responses are discarded by generation.

export type Clock = () => number;
export type Scheduler = (fn: () => void, ms: number) => unknown;
export type CancelTimer = (handle: unknown) => void;

export interface RateGateOptions {
  intervalMs?: number;
  now?: Clock;
  schedule?: Scheduler;
  cancel?: CancelTimer;
}

export class RateGate<T> {
  private readonly intervalMs: number;
  private readonly now: Clock;
  private readonly schedule: Scheduler;
  private readonly cancel: CancelTimer;
  private lastEmit = -Infinity;
  private pending: { value: T } | null = null;
  private timer: unknown = null;

  constructor(
    private readonly emit: (value: T) => void,
    options: RateGateOptions = {},
  ) {
    this.intervalMs = options.intervalMs ?? 1000 / 30;
    this.now = options.now ?? (() => performance.now());
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.cancel = options.cancel ?? ((h) => clearTimeout(h as number));
  }

  push(value: T): void {
    const t = this.now();
    if (t - this.lastEmit >= this.intervalMs) {
      this.clearTimer();
      this.pending = null;
      this.lastEmit = t;
      this.emit(value);
      return;
    }
    // too soon: stash and arm the trailing edge
    this.pending = { value };
    if (this.timer === null) {
      const wait = this.intervalMs - (t - this.lastEmit);
      this.timer = this.schedule(() => {
        this.timer = null;
        this.flush();
      }, wait);
    }
  }

  /** Emit the stashed value immediately, if any. Used on pointer-up. */
  flush(): void {
    this.clearTimer();
    if (this.pending !== null) {
      const { value } = this.pending;
      this.pending = null;
      this.lastEmit = this.now();
      this.emit(value);
    }
  }

  dispose(): void {
    this.clearTimer();
    this.pending = null;
  }

  private clearTimer(): void {
    if (this.timer !== null) {
      this.cancel(this.timer);
      this.timer = null;
    }
  }
}

/**
 * Serializes async work: at most one task in flight, and while one runs only
 * the newest submitted value survives. Results are delivered with their
 * submission generation so callers can ignore anything stale.
 */
export class LatestWins<T, R> {
  private inFlight = false;
  private queued: { value: T; generation: number } | null = null;
  private generation = 0;
  private newest = 0;

  constructor(
    private readonly work: (value: T) => Promise<R>,
    private readonly deliver: (result: R, generation: number, isNewest: boolean) => void,
    private readonly onError: (error: unknown) => void = () => {},
  ) {}

  submit(value: T): number {
    const generation = ++this.generation;
    this.newest = generation;
    if (this.inFlight) {
      this.queued = { value, generation };
    } else {
      void this.run(value, generation);
    }
    return generation;
  }

  /** Resolves once nothing is running or queued (drag-end barrier). */
  async idle(): Promise<void> {
    while (this.inFlight || this.queued !== null) {
      await new Promise((resolve) => setTimeout(resolve, 1));
    }
  }

  private async run(value: T, generation: number): Promise<void> {
    this.inFlight = true;
    try {
      const result = await this.work(value);
      this.deliver(result, generation, generation === this.newest);
    } catch (error) {
      this.onError(error);
    } finally {
      this.inFlight = false;
      if (this.queued !== null) {
        const next = this.queued;
        this.queued = null;
        void this.run(next.value, next.generation);
      }
    }
  }
}
