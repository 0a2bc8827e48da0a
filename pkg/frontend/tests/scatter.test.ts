import { describe, expect, it } from "vitest";

import {
  buildDrawList,
  fitViewport,
  hitTest,
  pan,
  screenToWorld,
  worldToScreen,
  zoom,
} from "../src/scatter.js";
import { UNCODED_COLOR } from "../src/colors.js";
import type { LayoutPoint } from "../src/types.js";

const POINTS: LayoutPoint[] = [
  { id: 1, x: 0, y: 0, label: "a" },
  { id: 2, x: 10, y: 0, label: "b" },
  { id: 3, x: 0, y: 10, label: "a", coded_as: "c1" },
  { id: 4, x: 10, y: 10, label: "b" },
];

describe("viewport math", () => {
  it("fit covers the point extent", () => {
    const view = fitViewport(POINTS, 800, 600);
    for (const p of POINTS) {
      const [sx, sy] = worldToScreen(view, p.x, p.y);
      expect(sx).toBeGreaterThanOrEqual(0);
      expect(sx).toBeLessThanOrEqual(800);
      expect(sy).toBeGreaterThanOrEqual(0);
      expect(sy).toBeLessThanOrEqual(600);
    }
  });

  it("screen/world transforms are inverse", () => {
    const view = fitViewport(POINTS, 800, 600);
    const [sx, sy] = worldToScreen(view, 3.7, 8.1);
    const [wx, wy] = screenToWorld(view, sx, sy);
    expect(wx).toBeCloseTo(3.7, 10);
    expect(wy).toBeCloseTo(8.1, 10);
  });

  it("pan shifts content with the pointer", () => {
    const view = fitViewport(POINTS, 800, 600);
    const before = worldToScreen(view, 5, 5);
    const panned = pan(view, 40, -25);
    const after = worldToScreen(panned, 5, 5);
    expect(after[0] - before[0]).toBeCloseTo(40, 8);
    expect(after[1] - before[1]).toBeCloseTo(-25, 8);
  });

  it("zoom keeps the anchor point fixed", () => {
    const view = fitViewport(POINTS, 800, 600);
    const anchor: [number, number] = [230, 410];
    const world = screenToWorld(view, ...anchor);
    const zoomed = zoom(view, 1.8, ...anchor);
    const after = worldToScreen(zoomed, ...world);
    expect(after[0]).toBeCloseTo(anchor[0], 8);
    expect(after[1]).toBeCloseTo(anchor[1], 8);
  });
});

describe("draw list", () => {
  const view = fitViewport(POINTS, 800, 600);

  it("colors by label consistently", () => {
    const commands = buildDrawList(POINTS, view, { colorBy: "label" });
    const byId = new Map(commands.map((c) => [c.id, c]));
    expect(byId.get(1)!.color).toBe(byId.get(3)!.color); // both label a
    expect(byId.get(1)!.color).not.toBe(byId.get(2)!.color);
  });

  it("recolors by code, uncoded points gray", () => {
    const commands = buildDrawList(POINTS, view, { colorBy: "code" });
    const byId = new Map(commands.map((c) => [c.id, c]));
    expect(byId.get(3)!.color).not.toBe(UNCODED_COLOR);
    expect(byId.get(1)!.color).toBe(UNCODED_COLOR);
    expect(byId.get(2)!.color).toBe(UNCODED_COLOR);
  });

  it("label filter drops other labels", () => {
    const commands = buildDrawList(POINTS, view, {
      colorBy: "label",
      labelFilter: new Set(["a"]),
    });
    expect(commands.map((c) => c.id).sort()).toEqual([1, 3]);
  });

  it("empty filter set means all points", () => {
    const commands = buildDrawList(POINTS, view, { colorBy: "label", labelFilter: new Set() });
    expect(commands).toHaveLength(4);
  });

  it("selected points are emphasized and drawn last", () => {
    const commands = buildDrawList(POINTS, view, {
      colorBy: "label",
      selection: new Set([2]),
    });
    const last = commands[commands.length - 1];
    expect(last.id).toBe(2);
    expect(last.emphasized).toBe(true);
    expect(last.radius).toBeGreaterThan(commands[0].radius);
  });

  it("a four-document highlight set renders four emphasized markers", () => {
    const docs: LayoutPoint[] = [51060, 51194, 52910, 53449, 60000, 60001].map((id, i) => ({
      id,
      x: i,
      y: -i,
      label: "alt.atheism",
    }));
    const docView = fitViewport(docs, 800, 600);
    const commands = buildDrawList(docs, docView, {
      colorBy: "label",
      selection: new Set([51060, 51194, 52910, 53449]),
    });
    const emphasized = commands.filter((c) => c.emphasized);
    expect(emphasized.map((c) => c.id).sort()).toEqual([51060, 51194, 52910, 53449]);
  });

  it("stays within an interactive frame budget at 20k points", () => {
    const big: LayoutPoint[] = [];
    for (let i = 0; i < 20000; i++) {
      big.push({ id: i, x: Math.sin(i), y: Math.cos(i * 0.7), label: `l${i % 20}` });
    }
    const bigView = fitViewport(big, 1200, 800);
    const started = performance.now();
    const commands = buildDrawList(big, bigView, { colorBy: "label" });
    const elapsed = performance.now() - started;
    expect(commands).toHaveLength(20000);
    expect(elapsed).toBeLessThan(250); // generous CI budget; ~ms locally
  });
});

describe("hit testing", () => {
  const view = fitViewport(POINTS, 800, 600);

  it("finds the nearest point within tolerance", () => {
    const [sx, sy] = worldToScreen(view, 10, 10);
    expect(hitTest(POINTS, view, sx + 2, sy - 2)!.id).toBe(4);
  });

  it("misses when nothing is close", () => {
    expect(hitTest(POINTS, view, 1, 1)).toBeNull();
  });
});
