/** Trailing-edge debouncer with injectable timers so tests can drive time. */

export interface Timers {
  set(fn: () => void, ms: number): unknown;
  clear(handle: unknown): void;
}

const realTimers: Timers = {
  set: (fn, ms) => setTimeout(fn, ms),
  clear: (handle) => clearTimeout(handle as Parameters<typeof clearTimeout>[0]),
};

export class Debouncer {
  private handle: unknown = null;

  constructor(private delayMs: number, private timers: Timers = realTimers) {}

  /** Schedule fn after the delay; a newer call replaces a pending one. */
  schedule(fn: () => void): void {
    if (this.handle !== null) this.timers.clear(this.handle);
    this.handle = this.timers.set(() => {
      this.handle = null;
      fn();
    }, this.delayMs);
  }

  cancel(): void {
    if (this.handle !== null) {
      this.timers.clear(this.handle);
      this.handle = null;
    }
  }

  get pending(): boolean {
    return this.handle !== null;
  }
}

/** Manual timer harness for tests. */
export class ManualTimers implements Timers {
  private queue = new Map<number, () => void>();
  private next = 1;

  set(fn: () => void, _ms: number): unknown {
    const id = this.next++;
    this.queue.set(id, fn);
    return id;
  }

  clear(handle: unknown): void {
    this.queue.delete(handle as number);
  }

  /** Fire every pending callback (the debounce window elapsing). */
  flush(): void {
    const pending = [...this.queue.values()];
    this.queue.clear();
    for (const fn of pending) fn();
  }

  get pendingCount(): number {
    return this.queue.size;
  }
}
