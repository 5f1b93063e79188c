"""Headless drivers: the throughput benchmark and the scripted-bot runner."""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from typing import Optional

from gridarena.backend import backend_name, get_kernel
from gridarena.bots import make_bots
from gridarena.env import make_env
from gridarena.errors import ConfigError
from gridarena.record import EpisodeWriter
from gridarena.seeds import derive_seed

BENCH_SCHEMA = 1


def run_benchmark(env_name: str = "rws", episodes: int = 1000,
                  steps: int = 1000, observation: str = "rgb", seed: int = 1,
                  players: int = 2, kernel_name: Optional[str] = None,
                  env_options: Optional[dict] = None) -> dict:
    """Uniform-random agents, wall-clock steps/sec and frames/sec.

    Episodes stop early on termination (random agents do fire), matching
    the convention that throughput counts steps actually simulated.
    The checksum folds every episode's final world hash, so identical
    seeds give identical checksums regardless of timing.
    """
    if episodes < 1 or steps < 1:
        raise ConfigError("episodes and steps must be >= 1")
    options = dict(env_options or {})
    options["observations"] = observation
    env = make_env(env_name, players, seed, kernel_name=kernel_name, **options)
    n_actions = len(env.action_spec())
    rng = get_kernel(kernel_name).Rng(derive_seed(seed, 0xBE7C4))
    checksum = hashlib.sha256()
    total_steps = 0
    randrange = rng.randrange
    t0 = time.perf_counter()
    for _ in range(episodes):
        env.reset()
        step = env.step
        for _ in range(steps):
            result = step([randrange(n_actions) for _ in range(players)])
            total_steps += 1
            if result.terminated:
                break
        checksum.update(env.world.state_hash().encode())
    seconds = time.perf_counter() - t0
    steps_per_sec = total_steps / seconds if seconds > 0 else float("inf")
    return {
        "schema": BENCH_SCHEMA,
        "env": env_name,
        "backend": kernel_name or backend_name(),
        "episodes": episodes,
        "steps_per_episode": steps,
        "players": players,
        "observation": observation,
        "seed": seed,
        "total_steps": total_steps,
        "seconds": round(seconds, 6),
        "steps_per_sec": round(steps_per_sec, 1),
        "frames_per_sec": round(steps_per_sec * players, 1),
        "checksum": checksum.hexdigest(),
    }


@dataclass
class RunSummary:
    episodes: int
    bots: list[str]
    mean_rewards: list[float]
    terminations: dict[str, int] = field(default_factory=dict)
    mean_steps: float = 0.0
    record_path: Optional[str] = None


def run_episodes(env_name: str, bot_names, episodes: int, seed: int,
                 record_path: Optional[str] = None,
                 env_options: Optional[dict] = None,
                 kernel_name: Optional[str] = None) -> RunSummary:
    """Drive scripted bots for whole episodes; optionally record them."""
    if episodes < 1:
        raise ConfigError("episodes must be >= 1")
    options = dict(env_options or {})
    env = make_env(env_name, len(bot_names), seed, kernel_name=kernel_name,
                   **options)
    writer = None
    if record_path:
        writer = EpisodeWriter(record_path, env, bot_names, seed,
                               env_options=env_options)
    totals = [0.0] * env.num_players
    terminations: dict[str, int] = {}
    total_steps = 0
    try:
        for ep in range(episodes):
            episode_seed = derive_seed(seed, ep)
            bots = make_bots(bot_names, episode_seed)
            env.reset()
            for p, bot in enumerate(bots):
                bot.reset(env, p)
            if writer:
                writer.begin_episode(ep, episode_seed)
            ep_totals = [0.0] * env.num_players
            step_index = 0
            while True:
                actions = [bot.act(env, p) for p, bot in enumerate(bots)]
                result = env.step(actions)
                if writer:
                    writer.step(step_index, actions, result)
                step_index += 1
                for p, r in enumerate(result.rewards):
                    ep_totals[p] += r
                if result.terminated:
                    break
            reason = env.termination_reason or "unknown"
            terminations[reason] = terminations.get(reason, 0) + 1
            total_steps += env.steps
            for p in range(env.num_players):
                totals[p] += ep_totals[p]
            if writer:
                writer.end_episode(ep, env.steps, reason, ep_totals,
                                   env.world.state_hash())
    finally:
        if writer:
            writer.close()
    return RunSummary(
        episodes=episodes,
        bots=list(bot_names),
        mean_rewards=[t / episodes for t in totals],
        terminations=terminations,
        mean_steps=total_steps / episodes,
        record_path=record_path,
    )
