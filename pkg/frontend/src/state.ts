/** Console state: a pure reducer over inbound server frames.
 *
 * The console never computes bindings locally — every highlight, intention,
 * plan, and verdict shown on screen originates from a server frame, so the
 * gateway stays the single source of truth.
 */

import type {
  Envelope,
  IntentionPayload,
  PlanPayload,
  RobotState,
  SceneObject,
  SelectionFeedbackPayload,
  StateUpdatePayload,
  TrajectoryFramePayload,
  VerdictPayload,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface TokenEntry {
  text: string;
  t: number;
  recognized: boolean;
}

export interface ConsoleState {
  connection: ConnectionStatus;
  sessionId: string | null;
  objects: SceneObject[];
  robot: RobotState | null;
  fusion: { phase: string; pending: unknown[] } | null;
  hover: SelectionFeedbackPayload | null;
  boundObjectId: string | null;
  tokens: TokenEntry[];
  intention: IntentionPayload | null;
  plan: PlanPayload | null;
  verdicts: VerdictPayload[];
  trajectory: TrajectoryFramePayload[];
  errors: string[];
}

export function initialState(): ConsoleState {
  return {
    connection: "connecting",
    sessionId: null,
    objects: [],
    robot: null,
    fusion: null,
    hover: null,
    boundObjectId: null,
    tokens: [],
    intention: null,
    plan: null,
    verdicts: [],
    trajectory: [],
    errors: [],
  };
}

export function markConnection(state: ConsoleState, status: ConnectionStatus): ConsoleState {
  return { ...state, connection: status };
}

/** Local echo when the operator sends a word; ordering matches send order. */
export function recordSentWord(state: ConsoleState, text: string, t: number): ConsoleState {
  return { ...state, tokens: [...state.tokens, { text, t, recognized: false }] };
}

export function applyFrame(state: ConsoleState, frame: Envelope): ConsoleState {
  switch (frame.kind) {
    case "state_update": {
      const payload = frame.payload as unknown as StateUpdatePayload;
      const fusionChanged =
        state.fusion !== null && JSON.stringify(state.fusion) !== JSON.stringify(payload.fusion);
      let tokens = state.tokens;
      if (fusionChanged && tokens.length > 0 && !tokens[tokens.length - 1]!.recognized) {
        tokens = tokens.slice(0, -1).concat([{ ...tokens[tokens.length - 1]!, recognized: true }]);
      }
      return {
        ...state,
        sessionId: frame.session_id ?? state.sessionId,
        objects: payload.objects,
        robot: payload.robot,
        fusion: payload.fusion,
        tokens,
      };
    }
    case "selection_feedback": {
      const payload = frame.payload as unknown as SelectionFeedbackPayload;
      return {
        ...state,
        hover: payload,
        boundObjectId: payload.authoritative ? payload.object_id : state.boundObjectId,
      };
    }
    case "intention_emitted":
      return { ...state, intention: frame.payload as unknown as IntentionPayload };
    case "plan":
      return { ...state, plan: frame.payload as unknown as PlanPayload };
    case "verdict":
      return {
        ...state,
        verdicts: [...state.verdicts, frame.payload as unknown as VerdictPayload],
      };
    case "trajectory_frame":
      return {
        ...state,
        trajectory: [...state.trajectory, frame.payload as unknown as TrajectoryFramePayload],
      };
    case "error": {
      const payload = frame.payload as { error?: string; message?: string };
      return {
        ...state,
        errors: [...state.errors, `${payload.error ?? "Error"}: ${payload.message ?? ""}`],
      };
    }
    default:
      return state;
  }
}

/** The highlight shown in the scene: the latest hover (or pronoun binding). */
export function highlightedObjectId(state: ConsoleState): string | null {
  return state.hover?.object_id ?? null;
}
