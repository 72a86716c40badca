/** Top-down orthographic view of the workcell and pointer-to-ray unprojection.
 *
 * The default view is a straight top-down orthographic map (screen x = world
 * x, screen y = -world y), which keeps drag geometry unambiguous: a drag
 * paints exactly the line on the table your pointer crossed.
 */

import type { Envelope, Vec3 } from "./protocol.js";
import { rayMessage } from "./protocol.js";

export interface ViewTransform {
  /** canvas pixels per meter */
  scale: number;
  /** canvas position of world origin */
  originPx: { x: number; y: number };
  /** height (m) at which drag rays travel over the table */
  pointingHeight: number;
}

export const DEFAULT_VIEW: ViewTransform = {
  scale: 320,
  originPx: { x: 360, y: 420 },
  pointingHeight: 0.06,
};

/** Minimum drag length in pixels before a drag counts as pointing. */
export const DEAD_ZONE_PX = 8;

export function worldToScreen(view: ViewTransform, x: number, y: number) {
  return { px: view.originPx.x + x * view.scale, py: view.originPx.y - y * view.scale };
}

export function screenToWorld(view: ViewTransform, px: number, py: number) {
  return { x: (px - view.originPx.x) / view.scale, y: (view.originPx.y - py) / view.scale };
}

export interface Drag {
  startPx: { x: number; y: number };
  endPx: { x: number; y: number };
}

export function dragLengthPx(drag: Drag): number {
  return Math.hypot(drag.endPx.x - drag.startPx.x, drag.endPx.y - drag.startPx.y);
}

/**
 * A drag across the scene becomes a pointing ray: both screen points
 * unproject onto the table plane at pointing height. Returns null inside
 * the dead zone (clicks are handled by clickToRay).
 */
export function pointerToRay(drag: Drag, view: ViewTransform, t: number): Envelope | null {
  if (dragLengthPx(drag) < DEAD_ZONE_PX) {
    return null;
  }
  const a = screenToWorld(view, drag.startPx.x, drag.startPx.y);
  const b = screenToWorld(view, drag.endPx.x, drag.endPx.y);
  const r1: Vec3 = [a.x, a.y, view.pointingHeight];
  const r2: Vec3 = [b.x, b.y, view.pointingHeight];
  return rayMessage(r1, r2, t);
}

/**
 * Touch mode: a click selects whatever sits under the pointer via a
 * synthetic ray dropped straight down from the view camera through the
 * clicked point (nearest-object distance reduces to horizontal distance).
 */
export function clickToRay(px: number, py: number, view: ViewTransform, t: number): Envelope {
  const w = screenToWorld(view, px, py);
  return rayMessage([w.x, w.y, 1.0], [w.x, w.y, 0.0], t);
}
