/** Wire protocol types and codecs for the play service (docs/protocol.md). */

export interface RgbPayload {
  w: number;
  h: number;
  b64: string;
}

export interface JoinMessage {
  type: "join";
  role: "seat" | "observer";
  seat?: number;
  token: string;
}

export interface ActionMessage {
  type: "action";
  step: number;
  action: number;
}

export interface ResetMessage {
  type: "reset";
}

export interface LeaveMessage {
  type: "leave";
}

export type ClientMessage = JoinMessage | ActionMessage | ResetMessage | LeaveMessage;

export interface SessionInfo {
  env: string;
  players: number;
  actions: string[];
  observations: Record<string, [number[], string]>;
  tick: { policy: string; ms: number };
  tile: number | null;
  world: { width?: number; height?: number };
}

export interface WelcomeMessage {
  type: "welcome";
  role: "seat" | "observer";
  seat: number | null;
  step: number;
  status: string;
  session: SessionInfo;
}

export type EventTuple = [string, Record<string, unknown>, number];

export interface FrameMessage {
  type: "frame";
  step: number;
  episode: number;
  episode_step: number;
  seat: number;
  rgb?: RgbPayload;
  inventory?: number[];
  reward: number;
  cum_reward: number;
  events: EventTuple[];
  status: "running" | "terminated";
  reason: string | null;
}

export interface GlobalFrameMessage {
  type: "global_frame";
  step: number;
  episode: number;
  episode_step: number;
  rgb?: RgbPayload;
  rewards: number[];
  cum_rewards: number[];
  events: EventTuple[];
  status: "running" | "terminated";
  reason: string | null;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
}

export type ServerMessage =
  | WelcomeMessage
  | FrameMessage
  | GlobalFrameMessage
  | ErrorMessage;

export class ProtocolError extends Error {}

const SERVER_TYPES = new Set(["welcome", "frame", "global_frame", "error"]);

function requireFields(obj: Record<string, unknown>, fields: string[], kind: string): void {
  for (const f of fields) {
    if (!(f in obj)) {
      throw new ProtocolError(`${kind} message missing field ${f}`);
    }
  }
}

/** Parse and structurally validate one server message. */
export function decodeServerMessage(raw: string): ServerMessage {
  let obj: Record<string, unknown>;
  try {
    obj = JSON.parse(raw) as Record<string, unknown>;
  } catch (err) {
    throw new ProtocolError(`invalid JSON: ${String(err)}`);
  }
  const type = obj["type"];
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) {
    throw new ProtocolError(`unknown server message type ${String(type)}`);
  }
  switch (type) {
    case "welcome":
      requireFields(obj, ["role", "seat", "step", "status", "session"], type);
      break;
    case "frame":
      requireFields(
        obj,
        ["step", "episode", "episode_step", "seat", "reward", "cum_reward", "events", "status"],
        type,
      );
      break;
    case "global_frame":
      requireFields(obj, ["step", "episode", "episode_step", "rewards", "events", "status"], type);
      break;
    case "error":
      requireFields(obj, ["code", "message"], type);
      break;
  }
  return obj as unknown as ServerMessage;
}

export function encodeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

function base64ToBytes(b64: string): Uint8ClampedArray {
  if (typeof atob === "function") {
    const bin = atob(b64);
    const out = new Uint8ClampedArray(bin.length);
    for (let i = 0; i < bin.length; i++) {
      out[i] = bin.charCodeAt(i);
    }
    return out;
  }
  return new Uint8ClampedArray(Buffer.from(b64, "base64"));
}

/** Decode an RGB payload; length must be exactly w*h*3 bytes. */
export function decodeRgb(payload: RgbPayload): Uint8ClampedArray {
  const bytes = base64ToBytes(payload.b64);
  const expected = payload.w * payload.h * 3;
  if (bytes.length !== expected) {
    throw new ProtocolError(
      `rgb payload is ${bytes.length} bytes, expected ${expected} (${payload.w}x${payload.h}x3)`,
    );
  }
  return bytes;
}
