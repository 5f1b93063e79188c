"""Live play service: one environment session shared over WebSockets.

Human players, scripted bots, and privileged observers join a single
episode stream. JSON text messages; RGB planes travel base64-encoded.
See docs/protocol.md for the full message reference.

Client to server:
    {"type": "join", "role": "seat", "seat": 0, "token": "..."}
    {"type": "join", "role": "observer", "token": "..."}
    {"type": "action", "step": N, "action": K}
    {"type": "reset"}
    {"type": "leave"}

Server to client:
    {"type": "welcome", ...}          session specs and your role
    {"type": "frame", ...}            per-seat observation frame
    {"type": "global_frame", ...}     privileged whole-world frame
    {"type": "error", "code": c, "message": m}

Frame ``step`` indices are session-scoped and strictly increasing, also
across episode resets; actions are accepted only for the latest frame's
step. The session loop is the only caller of ``env.step`` (exactly-once
stepping); handlers merely record pending actions.
"""

from __future__ import annotations

import asyncio
import base64
import secrets
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse
from starlette.staticfiles import StaticFiles

from gridarena.bots import Bot, make_bot
from gridarena.env import make_env
from gridarena.errors import ConfigError
from gridarena.render import render_global
from gridarena.seeds import derive_seed

NOOP_ACTION = 0


@dataclass
class SessionConfig:
    env_name: str = "rws"
    seats: list[str] = field(default_factory=lambda: ["human", "bot:noop"])
    seed: int = 1
    tick_policy: str = "fixed"  # "fixed" | "lockstep"
    tick_ms: int = 200
    lockstep_timeout_ms: Optional[int] = 5000
    env_options: dict = field(default_factory=dict)
    token: Optional[str] = None  # generated when absent

    def parse_seats(self) -> list[Optional[str]]:
        """Returns one bot-policy name per seat, None for human seats."""
        out = []
        for spec in self.seats:
            if spec == "human":
                out.append(None)
            elif spec.startswith("bot:"):
                out.append(spec[4:])
            else:
                raise ConfigError(
                    f"seat spec {spec!r} must be 'human' or 'bot:<policy>'")
        return out


class _Seat:
    def __init__(self, index: int, bot: Optional[Bot]):
        self.index = index
        self.bot = bot
        self.ws = None
        self.pending: Optional[int] = None
        self.cum_reward = 0.0


class Session:
    """Owns one Env; all mutation funnels through the step loop."""

    def __init__(self, config: SessionConfig):
        self.config = config
        policies = config.parse_seats()
        self.token = config.token or secrets.token_urlsafe(8)
        options = dict(config.env_options)
        options.setdefault("observations", "rgb")
        self.env = make_env(config.env_name, len(policies), config.seed,
                            **options)
        self.seats = [
            _Seat(i, make_bot(name, derive_seed(config.seed, 5000 + i))
                  if name else None)
            for i, name in enumerate(policies)]
        self.observers: list = []
        self.frame_step = -1  # session-scoped, monotone across resets
        self.started = False
        self.terminated = False
        self.reason: Optional[str] = None
        self._last_result = None
        self._actions_ready = asyncio.Event()
        self._reset_requested = False
        self._closed = False

    # -- wiring ---------------------------------------------------------------

    @property
    def human_seats(self) -> list[_Seat]:
        return [s for s in self.seats if s.bot is None]

    def seats_filled(self) -> bool:
        return all(s.ws is not None for s in self.human_seats)

    def welcome_payload(self, role: str, seat: Optional[int]) -> dict:
        env = self.env
        spec = env.observation_spec(seat if seat is not None else 0)
        world_info = {}
        if self.started:
            world_info = {"width": env.world.width, "height": env.world.height}
        tile = getattr(env.definition, "sprites", None)
        return {
            "type": "welcome",
            "role": role,
            "seat": seat,
            "step": self.frame_step,
            "status": self._status_name(),
            "session": {
                "env": self.config.env_name,
                "players": env.num_players,
                "actions": env.action_spec(),
                "observations": {k: [list(v.shape), v.dtype]
                                 for k, v in spec.items()},
                "tick": {"policy": self.config.tick_policy,
                         "ms": self.config.tick_ms},
                "tile": tile.tile if tile is not None else None,
                "world": world_info,
            },
        }

    def _status_name(self) -> str:
        if not self.started:
            return "waiting"
        return "terminated" if self.terminated else "running"

    # -- episode control ---------------------------------------------------------

    def start_episode(self) -> list[dict]:
        """Reset the env and build the initial broadcast frames."""
        observations = self.env.reset()
        self.started = True
        self.terminated = False
        self.reason = None
        for seat in self.seats:
            seat.pending = None
            seat.cum_reward = 0.0
            if seat.bot is not None:
                seat.bot.reset(self.env, seat.index)
        self.frame_step += 1
        return self._build_frames(observations, [0.0] * len(self.seats), [],
                                  terminated=False, reason=None)

    def collect_actions(self) -> list[int]:
        actions = []
        for seat in self.seats:
            if seat.bot is not None:
                actions.append(seat.bot.act(self.env, seat.index)
                               if not self.terminated else NOOP_ACTION)
            elif seat.pending is not None:
                actions.append(seat.pending)
            else:
                actions.append(NOOP_ACTION)
            seat.pending = None
        self._actions_ready.clear()
        return actions

    def step_once(self) -> list[dict]:
        """One env step plus the frames to broadcast. Loop-only."""
        actions = self.collect_actions()
        result = self.env.step(actions)
        self.frame_step += 1
        if result.terminated:
            self.terminated = True
            self.reason = result.reason
        for seat, r in zip(self.seats, result.rewards):
            seat.cum_reward += r
        return self._build_frames(result.observations, result.rewards,
                                  result.events, result.terminated,
                                  result.reason)

    def submit_action(self, seat_index: int, step: int, action: int) -> Optional[str]:
        """Record a pending action; returns an error code or None."""
        if not self.started or self.terminated:
            return "not_running"
        if step != self.frame_step:
            return "stale_action"
        if not 0 <= action < len(self.env.action_spec()):
            return "bad_action"
        self.seats[seat_index].pending = action
        if all(s.pending is not None for s in self.human_seats
               if s.ws is not None):
            self._actions_ready.set()
        return None

    # -- frame building --------------------------------------------------------------

    @staticmethod
    def _b64(arr) -> dict:
        return {"w": int(arr.shape[1]), "h": int(arr.shape[0]),
                "b64": base64.b64encode(arr.tobytes()).decode("ascii")}

    def _build_frames(self, observations, rewards, events, terminated, reason):
        status = "terminated" if terminated else "running"
        payloads = []
        event_list = [[e.name, e.payload, e.step] for e in events]
        for seat in self.seats:
            obs = observations[seat.index]
            frame = {
                "type": "frame",
                "step": self.frame_step,
                "episode": self.env.episode,
                "episode_step": self.env.steps,
                "seat": seat.index,
                "reward": rewards[seat.index],
                "cum_reward": seat.cum_reward,
                "events": event_list,
                "status": status,
                "reason": reason,
            }
            if "RGB" in obs:
                frame["rgb"] = self._b64(obs["RGB"])
            if "INVENTORY" in obs:
                frame["inventory"] = obs["INVENTORY"].tolist()
            payloads.append(frame)
        global_frame = {
            "type": "global_frame",
            "step": self.frame_step,
            "episode": self.env.episode,
            "episode_step": self.env.steps,
            "rewards": list(rewards),
            "cum_rewards": [s.cum_reward for s in self.seats],
            "events": event_list,
            "status": status,
            "reason": reason,
        }
        sprites = getattr(self.env.definition, "sprites", None)
        if sprites is not None and self.observers:
            frame = render_global(self.env.world, sprites, step=self.env.steps)
            global_frame["rgb"] = self._b64(frame.pixels)
        payloads.append(global_frame)
        return payloads


def create_app(config: SessionConfig, static_dir: Optional[str] = None) -> FastAPI:
    """FastAPI app hosting one session at /ws plus the static web client."""
    from contextlib import asynccontextmanager

    session = Session(config)

    @asynccontextmanager
    async def lifespan(_app):
        task = asyncio.create_task(session_loop())
        try:
            yield
        finally:
            session._closed = True
            task.cancel()

    app = FastAPI(title="gridarena play service", lifespan=lifespan)
    app.state.session = session

    async def broadcast(frames: list[dict]):
        global_frame = frames[-1]
        sends = []
        for seat in session.seats:
            if seat.ws is not None:
                sends.append(_safe_send(seat.ws, frames[seat.index]))
        for ws in list(session.observers):
            sends.append(_safe_send(ws, global_frame))
        if sends:
            await asyncio.gather(*sends)

    async def _safe_send(ws, payload):
        try:
            await ws.send_json(payload)
        except Exception:
            _drop_socket(ws)

    def _drop_socket(ws):
        for seat in session.seats:
            if seat.ws is ws:
                seat.ws = None
        if ws in session.observers:
            session.observers.remove(ws)

    async def session_loop():
        cfg = session.config
        while not session._closed:
            if not session.started or session.terminated:
                if session._reset_requested:
                    session._reset_requested = False
                    await broadcast(session.start_episode())
                else:
                    await asyncio.sleep(0.02)
                continue
            if cfg.tick_policy == "lockstep":
                timeout = (cfg.lockstep_timeout_ms / 1000
                           if cfg.lockstep_timeout_ms else None)
                try:
                    await asyncio.wait_for(session._actions_ready.wait(), timeout)
                except asyncio.TimeoutError:
                    pass  # fill missing actions with no-ops
            else:
                await asyncio.sleep(cfg.tick_ms / 1000)
            if session.started and not session.terminated:
                await broadcast(session.step_once())

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        role = None
        seat_index = None
        try:
            while True:
                msg = await ws.receive_json()
                kind = msg.get("type")
                if kind == "join":
                    if msg.get("token") != session.token:
                        await ws.send_json({"type": "error", "code": "bad_token",
                                            "message": "invalid session token"})
                        await ws.close()
                        return
                    if msg.get("role") == "observer":
                        role = "observer"
                        session.observers.append(ws)
                        await ws.send_json(session.welcome_payload(role, None))
                    else:
                        idx = int(msg.get("seat", -1))
                        if not 0 <= idx < len(session.seats):
                            await ws.send_json({
                                "type": "error", "code": "bad_seat",
                                "message": f"seat {idx} does not exist"})
                            continue
                        seat = session.seats[idx]
                        if seat.bot is not None:
                            await ws.send_json({
                                "type": "error", "code": "seat_is_bot",
                                "message": f"seat {idx} is bot-controlled"})
                            continue
                        if seat.ws is not None:
                            await ws.send_json({
                                "type": "error", "code": "seat_taken",
                                "message": f"seat {idx} already has a player"})
                            continue
                        seat.ws = ws
                        role, seat_index = "seat", idx
                        await ws.send_json(session.welcome_payload(role, idx))
                    if not session.started and session.seats_filled():
                        await broadcast(session.start_episode())
                elif kind == "action":
                    if role != "seat":
                        continue  # observers cannot act
                    err = session.submit_action(
                        seat_index, int(msg.get("step", -1)),
                        int(msg.get("action", 0)))
                    if err is not None:
                        await ws.send_json({
                            "type": "error", "code": err,
                            "message": f"action rejected: {err}"})
                elif kind == "reset":
                    if role == "seat" and session.terminated:
                        session._reset_requested = True
                elif kind == "leave":
                    await ws.close()
                    return
                else:
                    await ws.send_json({
                        "type": "error", "code": "bad_message",
                        "message": f"unknown message type {kind!r}"})
                    await ws.close()
                    return
        except WebSocketDisconnect:
            pass
        finally:
            _drop_socket(ws)

    root = Path(static_dir) if static_dir else _default_static_dir()
    if root is not None and root.is_dir():
        app.mount("/", StaticFiles(directory=str(root), html=True),
                  name="client")
    else:
        @app.get("/")
        async def index() -> HTMLResponse:
            return HTMLResponse(
                "<h1>gridarena play service</h1>"
                "<p>The web client bundle is not built; connect to /ws "
                "with a WebSocket client.</p>")
    return app


def _default_static_dir() -> Optional[Path]:
    for candidate in (
            Path(__file__).resolve().parents[2] / "frontend" / "dist",
            Path.cwd() / "frontend" / "dist"):
        if candidate.is_dir():
            return candidate
    return None


def serve(config: SessionConfig, host: str = "127.0.0.1", port: int = 8712,
          static_dir: Optional[str] = None) -> None:
    import uvicorn

    app = create_app(config, static_dir=static_dir)
    session = app.state.session
    print(f"session token: {session.token}")
    print(f"web client:    http://{host}:{port}/?token={session.token}")
    print(f"websocket:     ws://{host}:{port}/ws")
    uvicorn.run(app, host=host, port=port, log_level="warning")
