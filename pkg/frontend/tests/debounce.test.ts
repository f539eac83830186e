import { describe, expect, it } from "vitest";

import { Debouncer, ManualTimers } from "../src/debounce.js";

describe("Debouncer", () => {
  it("collapses rapid schedules into one trailing call", () => {
    const timers = new ManualTimers();
    const debouncer = new Debouncer(200, timers);
    let calls = 0;
    for (let i = 0; i < 10; i++) debouncer.schedule(() => calls++);
    expect(timers.pendingCount).toBe(1);
    timers.flush();
    expect(calls).toBe(1);
  });

  it("fires again for schedules after the window elapsed", () => {
    const timers = new ManualTimers();
    const debouncer = new Debouncer(200, timers);
    let calls = 0;
    debouncer.schedule(() => calls++);
    timers.flush();
    debouncer.schedule(() => calls++);
    timers.flush();
    expect(calls).toBe(2);
  });

  it("cancel drops the pending call", () => {
    const timers = new ManualTimers();
    const debouncer = new Debouncer(200, timers);
    let calls = 0;
    debouncer.schedule(() => calls++);
    debouncer.cancel();
    timers.flush();
    expect(calls).toBe(0);
    expect(debouncer.pending).toBe(false);
  });
});
