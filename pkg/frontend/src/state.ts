/** Connection-independent client state: frames, input, HUD data.
 *
 * Rendering is monotone: frames whose step is not ahead of the last
 * rendered one are discarded, as are frames with malformed pixel
 * payloads (the previous frame persists and an error counter ticks).
 * One pending action per step, last writer wins.
 */

import {
  decodeRgb,
  EventTuple,
  FrameMessage,
  GlobalFrameMessage,
  ProtocolError,
  WelcomeMessage,
} from "./protocol.js";

export interface DecodedFrame {
  step: number;
  episode: number;
  episodeStep: number;
  rgb: Uint8ClampedArray | null;
  width: number;
  height: number;
  reward: number;
  cumReward: number;
  rewards: number[] | null; // observers only
  inventory: number[] | null;
  events: EventTuple[];
  terminated: boolean;
  reason: string | null;
}

export type ClientStatus = "connecting" | "waiting" | "running" | "terminated" | "error";

const KEY_TO_ACTION_NAME: Record<string, string> = {
  ArrowUp: "forward",
  w: "forward",
  W: "forward",
  ArrowDown: "backward",
  s: "backward",
  S: "backward",
  a: "strafe-left",
  A: "strafe-left",
  d: "strafe-right",
  D: "strafe-right",
  ArrowLeft: "turn-left",
  q: "turn-left",
  Q: "turn-left",
  ArrowRight: "turn-right",
  e: "turn-right",
  E: "turn-right",
  " ": "fire-beam",
};

export class ClientState {
  status: ClientStatus = "connecting";
  role: "seat" | "observer" | null = null;
  seat: number | null = null;
  actionNames: string[] = [];
  tile: number | null = null;
  frame: DecodedFrame | null = null;
  lastStep = -1;
  droppedFrames = 0;
  eventLog: string[] = [];
  errorText: string | null = null;
  private pendingAction: number | null = null;
  private pendingStep = -1;

  onWelcome(msg: WelcomeMessage): void {
    this.role = msg.role;
    this.seat = msg.seat;
    this.actionNames = msg.session.actions;
    this.tile = msg.session.tile;
    this.status = msg.status === "waiting" ? "waiting" : this.status;
  }

  /** Returns true when the frame should be (re)drawn. */
  onFrame(msg: FrameMessage | GlobalFrameMessage): boolean {
    if (msg.step <= this.lastStep) {
      this.droppedFrames += 1; // out of order: discard
      return false;
    }
    let rgb: Uint8ClampedArray | null = null;
    let width = 0;
    let height = 0;
    if (msg.rgb) {
      try {
        rgb = decodeRgb(msg.rgb);
        width = msg.rgb.w;
        height = msg.rgb.h;
      } catch (err) {
        if (!(err instanceof ProtocolError)) {
          throw err;
        }
        this.droppedFrames += 1; // malformed payload: keep prior frame
        return false;
      }
    }
    const isSeat = msg.type === "frame";
    this.lastStep = msg.step;
    this.frame = {
      step: msg.step,
      episode: msg.episode,
      episodeStep: msg.episode_step,
      rgb,
      width,
      height,
      reward: isSeat ? (msg as FrameMessage).reward : 0,
      cumReward: isSeat ? (msg as FrameMessage).cum_reward : 0,
      rewards: isSeat ? null : (msg as GlobalFrameMessage).rewards,
      inventory: isSeat ? ((msg as FrameMessage).inventory ?? null) : null,
      events: msg.events,
      terminated: msg.status === "terminated",
      reason: msg.reason ?? null,
    };
    for (const [name, payload] of msg.events) {
      this.eventLog.push(`step ${msg.step}: ${name} ${JSON.stringify(payload)}`);
    }
    this.status = this.frame.terminated ? "terminated" : "running";
    return true;
  }

  onError(code: string, message: string): void {
    this.errorText = `${code}: ${message}`;
    if (code === "bad_token" || code === "seat_taken") {
      this.status = "error";
    }
  }

  /** Map a key to an action index; null when unbound or not seated. */
  keyToAction(key: string): number | null {
    if (this.role !== "seat" || this.status !== "running") {
      return null;
    }
    const name = KEY_TO_ACTION_NAME[key];
    if (name === undefined) {
      return null;
    }
    const idx = this.actionNames.indexOf(name);
    return idx >= 0 ? idx : null;
  }

  /** Record an action for the current step; the last call wins. */
  setPendingAction(action: number): void {
    if (this.frame === null) {
      return;
    }
    this.pendingAction = action;
    this.pendingStep = this.frame.step;
  }

  /** The action message to send now, if any (consumes the pending slot). */
  takePendingAction(): { step: number; action: number } | null {
    if (this.pendingAction === null || this.frame === null) {
      return null;
    }
    if (this.pendingStep !== this.frame.step) {
      this.pendingAction = null; // stale: episode moved on
      return null;
    }
    const out = { step: this.pendingStep, action: this.pendingAction };
    this.pendingAction = null;
    return out;
  }
}
