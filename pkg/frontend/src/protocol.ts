/** Wire protocol types and canonical serialization for the gateway socket. */

export const PROTOCOL_VERSION = 1;

export type Vec3 = [number, number, number];

export interface Envelope<P = Record<string, unknown>> {
  v: number;
  kind: string;
  session_id?: string;
  t?: number;
  payload: P;
}

export interface SceneObject {
  id: string;
  class: string;
  position: Vec3;
  height_m: number;
  width_m: number;
}

export interface RobotState {
  pose: number[];
  gripper_angle: number;
  holding: string | null;
}

export interface StateUpdatePayload {
  fusion: { phase: string; pending: unknown[] };
  objects: SceneObject[];
  robot: RobotState;
}

export interface SelectionFeedbackPayload {
  object_id: string | null;
  distance_m?: number;
  class?: string;
  authoritative: boolean;
  reason?: string;
}

export interface IntentionPayload {
  intention: {
    subcommands: { action: string; object_id: string | null }[];
    omega: unknown;
  };
  canonical: string;
}

export interface PlanPayload {
  text: string;
  provenance: string;
}

export interface VerdictPayload {
  stage: string;
  ok: boolean;
  error?: string;
  message?: string;
  steps?: number;
}

export interface TrajectoryFramePayload {
  tick: number;
  step_index: number;
  primitive: string;
  args: Record<string, number>;
  robot: RobotState;
  events: string[];
}

/** JSON with recursively sorted keys and compact separators — byte-identical
 * to the server's canonical serialization. */
export function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalJson).join(",") + "]";
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([k, v]) => JSON.stringify(k) + ":" + canonicalJson(v));
  return "{" + entries.join(",") + "}";
}

export function wordMessage(
  text: string,
  tStart: number,
  tEnd: number,
  confidence = 1.0,
): Envelope {
  return {
    v: PROTOCOL_VERSION,
    kind: "word",
    payload: { text, t_start: tStart, t_end: tEnd, confidence },
  };
}

export function rayMessage(r1: Vec3, r2: Vec3, t: number): Envelope {
  return { v: PROTOCOL_VERSION, kind: "ray", payload: { r1, r2, t } };
}

export function sceneRequest(t: number): Envelope {
  return { v: PROTOCOL_VERSION, kind: "scene_request", t, payload: {} };
}

export function parseFrame(text: string): Envelope {
  const frame = JSON.parse(text) as Envelope;
  if (frame.v !== PROTOCOL_VERSION) {
    throw new Error(`unsupported protocol version ${frame.v}`);
  }
  if (typeof frame.kind !== "string") {
    throw new Error("frame has no kind");
  }
  return frame;
}
