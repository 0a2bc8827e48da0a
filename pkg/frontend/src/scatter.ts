// Canvas scatter plot: pan/zoom, hit-testing, label/code coloring.
//
// The math (viewport transform, draw-list building, hit-testing) is pure
// and testable without a DOM; rendering takes a minimal 2D-context
// interface so tests can stub it. DOM overlays are used only for the
// selection markers, never for the point cloud itself.

import { colorMap, UNCODED_COLOR } from "./colors.js";
import type { LayoutPoint, SampleId } from "./types.js";

export interface Viewport {
  // world-coordinate center and scale (pixels per world unit)
  centerX: number;
  centerY: number;
  scale: number;
  width: number;
  height: number;
}

export function fitViewport(points: LayoutPoint[], width: number, height: number): Viewport {
  if (points.length === 0) {
    return { centerX: 0, centerY: 0, scale: 1, width, height };
  }
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const p of points) {
    if (p.x < minX) minX = p.x;
    if (p.x > maxX) maxX = p.x;
    if (p.y < minY) minY = p.y;
    if (p.y > maxY) maxY = p.y;
  }
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const scale = 0.9 * Math.min(width / spanX, height / spanY);
  return {
    centerX: (minX + maxX) / 2,
    centerY: (minY + maxY) / 2,
    scale,
    width,
    height,
  };
}

export function worldToScreen(view: Viewport, x: number, y: number): [number, number] {
  return [
    view.width / 2 + (x - view.centerX) * view.scale,
    // screen y grows downward
    view.height / 2 - (y - view.centerY) * view.scale,
  ];
}

export function screenToWorld(view: Viewport, sx: number, sy: number): [number, number] {
  return [
    view.centerX + (sx - view.width / 2) / view.scale,
    view.centerY - (sy - view.height / 2) / view.scale,
  ];
}

export function pan(view: Viewport, dxPixels: number, dyPixels: number): Viewport {
  return {
    ...view,
    centerX: view.centerX - dxPixels / view.scale,
    centerY: view.centerY + dyPixels / view.scale,
  };
}

/** Zoom by a factor keeping the world point under (sx, sy) fixed. */
export function zoom(view: Viewport, factor: number, sx: number, sy: number): Viewport {
  const [wx, wy] = screenToWorld(view, sx, sy);
  const scale = view.scale * factor;
  return {
    ...view,
    scale,
    centerX: wx - (sx - view.width / 2) / scale,
    centerY: wy + (sy - view.height / 2) / scale,
  };
}

export interface DrawCommand {
  id: SampleId;
  sx: number;
  sy: number;
  color: string;
  radius: number;
  emphasized: boolean;
}

export interface DrawOptions {
  colorBy: "label" | "code";
  labelFilter?: Set<string>;
  selection?: Set<SampleId>;
  radius?: number;
}

/**
 * Pure draw-list construction: filtering, coloring (by label or by
 * assigned code), and selection emphasis. Selected points are returned
 * last so they render on top.
 */
export function buildDrawList(
  points: LayoutPoint[],
  view: Viewport,
  options: DrawOptions,
): DrawCommand[] {
  const radius = options.radius ?? 2;
  const colors =
    options.colorBy === "code"
      ? colorMap(points.map((p) => p.coded_as).filter((c): c is string => c !== undefined))
      : colorMap(points.map((p) => p.label));
  const normal: DrawCommand[] = [];
  const emphasized: DrawCommand[] = [];
  for (const point of points) {
    if (options.labelFilter && options.labelFilter.size > 0 && !options.labelFilter.has(point.label)) {
      continue;
    }
    const [sx, sy] = worldToScreen(view, point.x, point.y);
    const color =
      options.colorBy === "code"
        ? point.coded_as !== undefined
          ? colors.get(point.coded_as)!
          : UNCODED_COLOR
        : colors.get(point.label)!;
    const isSelected = options.selection?.has(point.id) ?? false;
    const command = {
      id: point.id,
      sx,
      sy,
      color,
      radius: isSelected ? radius * 2.5 : radius,
      emphasized: isSelected,
    };
    (isSelected ? emphasized : normal).push(command);
  }
  return normal.concat(emphasized);
}

/** Nearest point within `tolerance` screen pixels of (sx, sy), or null. */
export function hitTest(
  points: LayoutPoint[],
  view: Viewport,
  sx: number,
  sy: number,
  tolerance = 6,
): LayoutPoint | null {
  let best: LayoutPoint | null = null;
  let bestDistance = tolerance * tolerance;
  for (const point of points) {
    const [px, py] = worldToScreen(view, point.x, point.y);
    const dx = px - sx;
    const dy = py - sy;
    const d2 = dx * dx + dy * dy;
    if (d2 <= bestDistance) {
      best = point;
      bestDistance = d2;
    }
  }
  return best;
}

// Minimal context interface so rendering is testable without a canvas.
export interface Context2DLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
}

export function render(ctx: Context2DLike, view: Viewport, commands: DrawCommand[]): void {
  ctx.clearRect(0, 0, view.width, view.height);
  for (const command of commands) {
    ctx.beginPath();
    ctx.fillStyle = command.color;
    ctx.arc(command.sx, command.sy, command.radius, 0, Math.PI * 2);
    ctx.fill();
    if (command.emphasized) {
      ctx.strokeStyle = "#000000";
      ctx.lineWidth = 1.5;
      ctx.stroke();
    }
  }
}
