import { describe, expect, it } from "vitest";

import {
  clickToRay,
  DEAD_ZONE_PX,
  DEFAULT_VIEW,
  pointerToRay,
  screenToWorld,
  worldToScreen,
} from "../src/view.js";

const VIEW = { scale: 320, originPx: { x: 360, y: 420 }, pointingHeight: 0.06 };

describe("view transform", () => {
  it("world origin maps to the configured canvas point", () => {
    expect(worldToScreen(VIEW, 0, 0)).toEqual({ px: 360, py: 420 });
  });

  it("y points up on the table, down on the canvas", () => {
    const { py } = worldToScreen(VIEW, 0, 0.5);
    expect(py).toBeLessThan(420);
  });

  it("round-trips", () => {
    for (const [x, y] of [[0.3, 0.25], [-0.6, 0.65], [0.123, 0.456]] as const) {
      const { px, py } = worldToScreen(VIEW, x, y);
      const w = screenToWorld(VIEW, px, py);
      expect(w.x).toBeCloseTo(x, 12);
      expect(w.y).toBeCloseTo(y, 12);
    }
  });
});

describe("pointerToRay", () => {
  it("unprojects both drag endpoints at pointing height", () => {
    const drag = { startPx: { x: 360, y: 420 }, endPx: { x: 680, y: 420 } };
    const msg = pointerToRay(drag, VIEW, 2.0)!;
    expect(msg.kind).toBe("ray");
    expect(msg.payload).toEqual({ r1: [0, 0, 0.06], r2: [1, 0, 0.06], t: 2.0 });
  });

  it("suppresses drags inside the dead zone", () => {
    const drag = {
      startPx: { x: 360, y: 420 },
      endPx: { x: 360 + DEAD_ZONE_PX - 1, y: 420 },
    };
    expect(pointerToRay(drag, VIEW, 1.0)).toBeNull();
  });

  it("uses the default view constants", () => {
    expect(DEFAULT_VIEW.pointingHeight).toBeGreaterThan(0);
  });
});

describe("clickToRay", () => {
  it("drops a vertical ray through the clicked world point", () => {
    const { px, py } = worldToScreen(VIEW, 0.2, 0.35);
    const msg = clickToRay(px, py, VIEW, 3.0);
    const payload = msg.payload as { r1: number[]; r2: number[] };
    expect(payload.r1[0]).toBeCloseTo(0.2, 12);
    expect(payload.r1[1]).toBeCloseTo(0.35, 12);
    expect(payload.r1[2]).toBe(1.0);
    expect(payload.r2[2]).toBe(0.0);
  });
});
