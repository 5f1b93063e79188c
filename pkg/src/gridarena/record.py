"""Episode records: line-delimited JSON, written by runs, verified by replay.

Layout (one JSON object per line):

    {"kind": "header", "schema": 1, "env": ..., "players": N,
     "seed": root, "bots": [...], "actions": [...], "spec_hash": ...}
    {"kind": "episode", "index": i, "seed": episode_seed}
    {"kind": "step", "index": j, "actions": [...], "rewards": [...],
     "events": [[name, payload, step], ...]}
    {"kind": "end", "index": i, "steps": n, "reason": ...,
     "totals": [...], "world_hash": ...}

Replay contract: feeding the recorded actions into a fresh environment
built from the header reproduces every reward, every event, and each
episode's final world hash exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

from gridarena.env import make_env
from gridarena.seeds import derive_seed

SCHEMA = 1


class RecordError(Exception):
    """The record file is malformed."""


def spec_hash(env) -> str:
    payload = json.dumps([
        env.definition.name,
        env.action_spec(),
        [{k: [list(v.shape), v.dtype] for k, v in spec.items()}
         for spec in env.observation_spec()],
    ], sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


class EpisodeWriter:
    def __init__(self, path, env, bots, seed: int, env_options: Optional[dict] = None):
        self._fh = open(path, "w", encoding="utf-8")
        self._write({
            "kind": "header", "schema": SCHEMA, "env": env.definition.name,
            "players": env.num_players, "seed": int(seed),
            "bots": list(bots), "actions": env.action_spec(),
            "env_options": env_options or {}, "spec_hash": spec_hash(env),
        })

    def _write(self, obj) -> None:
        self._fh.write(json.dumps(obj, separators=(",", ":"), sort_keys=True))
        self._fh.write("\n")

    def begin_episode(self, index: int, seed: int) -> None:
        self._write({"kind": "episode", "index": index, "seed": int(seed)})

    def step(self, index: int, actions, result) -> None:
        self._write({
            "kind": "step", "index": index, "actions": list(actions),
            "rewards": list(result.rewards),
            "events": [[e.name, e.payload, e.step] for e in result.events],
        })

    def end_episode(self, index: int, steps: int, reason, totals, world_hash) -> None:
        self._write({
            "kind": "end", "index": index, "steps": steps, "reason": reason,
            "totals": list(totals), "world_hash": world_hash,
        })

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_record(path):
    """Parse a record file into (header, [episodes]); raises RecordError."""
    header = None
    episodes = []
    current = None
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise RecordError(f"line {lineno}: invalid JSON: {exc}") from exc
                kind = obj.get("kind")
                if kind == "header":
                    header = obj
                elif kind == "episode":
                    current = {"meta": obj, "steps": [], "end": None}
                    episodes.append(current)
                elif kind == "step":
                    if current is None:
                        raise RecordError(f"line {lineno}: step outside episode")
                    current["steps"].append(obj)
                elif kind == "end":
                    if current is None:
                        raise RecordError(f"line {lineno}: end outside episode")
                    current["end"] = obj
                else:
                    raise RecordError(f"line {lineno}: unknown kind {kind!r}")
    except OSError as exc:
        raise RecordError(str(exc)) from exc
    if header is None:
        raise RecordError("record has no header line")
    if header.get("schema") != SCHEMA:
        raise RecordError(f"unsupported schema {header.get('schema')!r}")
    for ep in episodes:
        if ep["end"] is None:
            raise RecordError(f"episode {ep['meta'].get('index')} has no end line")
    return header, episodes


@dataclass
class ReplayReport:
    ok: bool
    episodes: int = 0
    steps: int = 0
    divergence: Optional[str] = None
    failures: list = field(default_factory=list)


def _canon(value):
    return json.loads(json.dumps(value))


def replay_record(path, kernel_name: Optional[str] = None) -> ReplayReport:
    """Re-simulate a record and compare step by step.

    ``kernel_name`` forces an engine backend, so records made with the
    compiled core can be verified against the pure-Python one.
    """
    header, episodes = read_record(path)
    options = dict(header.get("env_options") or {})
    options["observations"] = "none"  # observations don't affect dynamics
    env = make_env(header["env"], header["players"], header["seed"],
                   kernel_name=kernel_name, **options)
    report = ReplayReport(ok=True)

    def diverge(msg):
        report.ok = False
        if report.divergence is None:
            report.divergence = msg
        report.failures.append(msg)

    for ep in episodes:
        idx = ep["meta"]["index"]
        expect_seed = derive_seed(header["seed"], idx)
        if ep["meta"]["seed"] != expect_seed:
            diverge(f"episode {idx}: seed {ep['meta']['seed']} != derived {expect_seed}")
            return report
        env.reset()
        totals = [0.0] * header["players"]
        for srec in ep["steps"]:
            result = env.step(srec["actions"])
            report.steps += 1
            got_rewards = _canon(list(result.rewards))
            if got_rewards != srec["rewards"]:
                diverge(f"episode {idx} step {srec['index']}: rewards "
                        f"{got_rewards} != recorded {srec['rewards']}")
                return report
            got_events = _canon([[e.name, e.payload, e.step] for e in result.events])
            if got_events != srec["events"]:
                diverge(f"episode {idx} step {srec['index']}: events differ")
                return report
            for p, r in enumerate(result.rewards):
                totals[p] += r
        end = ep["end"]
        if env.steps != end["steps"]:
            diverge(f"episode {idx}: step count {env.steps} != {end['steps']}")
            return report
        if (env.termination_reason or None) != end["reason"]:
            diverge(f"episode {idx}: reason {env.termination_reason} != {end['reason']}")
            return report
        if _canon(totals) != end["totals"]:
            diverge(f"episode {idx}: totals {totals} != {end['totals']}")
            return report
        if env.world.state_hash() != end["world_hash"]:
            diverge(f"episode {idx}: world hash mismatch")
            return report
        report.episodes += 1
    return report
