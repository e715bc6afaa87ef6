/**
 * Frame consumption with coalescing: when frames arrive faster than the
 * render loop, only the newest one is painted, and the displayed step
 * counter always equals the latest rendered frame's step.
 */

import type { StreamFrame } from "./types.js";

export type RenderScheduler = (callback: () => void) => void;

const asapScheduler: RenderScheduler =
  typeof requestAnimationFrame === "function"
    ? (cb) => requestAnimationFrame(() => cb())
    : (cb) => setTimeout(cb, 0);

export class TrialView {
  private pending: StreamFrame | null = null;
  private scheduled = false;
  latest: StreamFrame | null = null;
  renders = 0;

  constructor(
    private readonly paint: (frame: StreamFrame) => void,
    private readonly scheduler: RenderScheduler = asapScheduler,
  ) {}

  get step(): number | null {
    return this.latest ? this.latest.step : null;
  }

  get status(): string | null {
    return this.latest ? this.latest.status : null;
  }

  onFrame(frame: StreamFrame): void {
    // Never step backwards: frames are strictly increasing per stream,
    // so anything older than what is queued or shown is stale.
    if (this.pending && frame.step <= this.pending.step) return;
    if (this.latest && frame.step <= this.latest.step) return;
    this.pending = frame;
    if (!this.scheduled) {
      this.scheduled = true;
      this.scheduler(() => this.renderPending());
    }
  }

  private renderPending(): void {
    this.scheduled = false;
    if (!this.pending) return;
    this.latest = this.pending;
    this.pending = null;
    this.renders++;
    this.paint(this.latest);
  }
}

/** Two synchronized-but-independent views for trial comparison. */
export class SideBySide {
  readonly left: TrialView;
  readonly right: TrialView;

  constructor(
    paintLeft: (frame: StreamFrame) => void,
    paintRight: (frame: StreamFrame) => void,
    scheduler?: RenderScheduler,
  ) {
    this.left = new TrialView(paintLeft, scheduler);
    this.right = new TrialView(paintRight, scheduler);
  }

  steps(): [number | null, number | null] {
    return [this.left.step, this.right.step];
  }
}
