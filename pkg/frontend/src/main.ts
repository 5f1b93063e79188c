/** Page wiring: WebSocket, canvas, keyboard, HUD. */

import {
  ActionMessage,
  decodeServerMessage,
  encodeClientMessage,
  ErrorMessage,
  FrameMessage,
  GlobalFrameMessage,
  WelcomeMessage,
} from "./protocol.js";
import { chooseIntegerScale, scaleNearestRgbToRgba } from "./render.js";
import { ClientState } from "./state.js";

const params = new URLSearchParams(window.location.search);
const token = params.get("token") ?? "";
const roleParam = params.get("role") ?? "seat";
const seatParam = parseInt(params.get("seat") ?? "0", 10);

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const hud = document.getElementById("hud")!;
const overlay = document.getElementById("overlay")!;
const log = document.getElementById("log")!;

const state = new ClientState();
const wsUrl = `${window.location.protocol === "https:" ? "wss" : "ws"}://${window.location.host}/ws`;
let ws: WebSocket | null = null;

function connect(): void {
  ws = new WebSocket(wsUrl);
  ws.onopen = () => {
    const join =
      roleParam === "observer"
        ? { type: "join" as const, role: "observer" as const, token }
        : { type: "join" as const, role: "seat" as const, seat: seatParam, token };
    ws!.send(encodeClientMessage(join));
    setHud("joining…");
  };
  ws.onmessage = (ev) => {
    const msg = decodeServerMessage(String(ev.data));
    if (msg.type === "welcome") {
      state.onWelcome(msg as WelcomeMessage);
      setHud(`joined as ${state.role}${state.role === "seat" ? ` ${state.seat}` : ""} — waiting`);
    } else if (msg.type === "frame" || msg.type === "global_frame") {
      if (state.onFrame(msg as FrameMessage | GlobalFrameMessage)) {
        draw();
      }
    } else {
      state.onError((msg as ErrorMessage).code, (msg as ErrorMessage).message);
      renderHud();
    }
  };
  ws.onclose = () => {
    setHud("disconnected — retrying in 2s");
    setTimeout(connect, 2000);
  };
  ws.onerror = () => {
    setHud("connection error");
  };
}

function setHud(text: string): void {
  hud.textContent = text;
}

function renderHud(): void {
  const f = state.frame;
  const bits: string[] = [];
  if (f !== null) {
    bits.push(`step ${f.episodeStep} (episode ${f.episode})`);
    if (state.role === "seat") {
      bits.push(`reward ${f.cumReward.toFixed(3)}`);
      if (f.inventory) {
        bits.push(`inventory r${f.inventory[0]} p${f.inventory[1]} s${f.inventory[2]}`);
      }
    } else if (f.rewards) {
      bits.push(`rewards [${f.rewards.map((r) => r.toFixed(2)).join(", ")}]`);
    }
    bits.push(state.status);
  }
  if (state.droppedFrames > 0) {
    bits.push(`dropped ${state.droppedFrames}`);
  }
  if (state.errorText !== null) {
    bits.push(`⚠ ${state.errorText}`);
  }
  setHud(bits.join(" · "));
  log.textContent = state.eventLog.slice(-8).join("\n");
  if (state.status === "terminated" && f !== null) {
    overlay.textContent = `Episode over: ${f.reason ?? "?"} — press Enter for a new episode`;
    overlay.classList.add("visible");
  } else {
    overlay.classList.remove("visible");
  }
}

function draw(): void {
  const f = state.frame;
  if (f === null || f.rgb === null) {
    renderHud();
    return;
  }
  const scale = chooseIntegerScale(f.width, f.height, 640, 640);
  const rgba = scaleNearestRgbToRgba(f.rgb, f.width, f.height, scale);
  canvas.width = f.width * scale;
  canvas.height = f.height * scale;
  const image = ctx.createImageData(canvas.width, canvas.height);
  image.data.set(rgba);
  ctx.putImageData(image, 0, 0);
  renderHud();
}

window.addEventListener("keydown", (ev) => {
  if (ev.key === "Enter" && state.status === "terminated" && ws) {
    ws.send(encodeClientMessage({ type: "reset" }));
    return;
  }
  const action = state.keyToAction(ev.key);
  if (action === null || ws === null) {
    return;
  }
  ev.preventDefault();
  state.setPendingAction(action); // duplicates within a tick keep the last
  const pending = state.takePendingAction();
  if (pending !== null) {
    const msg: ActionMessage = { type: "action", step: pending.step, action: pending.action };
    ws.send(encodeClientMessage(msg));
  }
});

connect();
