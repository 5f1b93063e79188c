"""The multi-player environment API: reset/step, specs, properties.

Players submit one action index each per step. Actions are applied in a
seeded-shuffled player order (conflicts resolve by that order), then the
world ticks its updaters, then environment logic checks termination.
Rewards accumulate only through ``add_reward`` calls made by environment
logic. Events raised during the step are delivered with that step's
result, including on the terminal step.

Observation buffers may be reused across steps for throughput: treat
returned observations as valid until the next ``step``/``reset`` call
and copy them if you need to keep them.
"""

from __future__ import annotations

from typing import Optional, Sequence

from gridarena.definition import EnvironmentDefinition, environment_factory
from gridarena.errors import ConfigError, NotFoundError, StateError
from gridarena.scheduler import UpdateOrder
from gridarena.seeds import derive_seed


class StepResult:
    __slots__ = ("observations", "rewards", "events", "terminated", "reason")

    def __init__(self, observations, rewards, events, terminated, reason):
        self.observations = observations
        self.rewards = rewards
        self.events = events
        self.terminated = terminated
        self.reason = reason

    @property
    def status(self) -> str:
        return f"terminated({self.reason})" if self.terminated else "running"


class Env:
    """One multi-player episode stream driven by an environment definition."""

    def __init__(self, definition: EnvironmentDefinition, num_players: int,
                 seed: int, seed_mode: str = "advance",
                 kernel_name: str | None = None):
        definition.check_player_count(num_players)
        if seed_mode not in ("advance", "fixed"):
            raise ConfigError(f"unknown seed mode {seed_mode!r}")
        self.definition = definition
        self.num_players = num_players
        self.kernel_name = kernel_name
        self._base_seed = int(seed)
        self._seed_mode = seed_mode
        self.episode = 0
        self.steps = 0
        self._world = None
        self._status = "idle"
        self._reason: Optional[str] = None
        self._actions = definition.action_names()
        self._n_actions = len(self._actions)
        self._order = list(range(num_players))
        self._step_rewards = [0.0] * num_players
        self._update_order = UpdateOrder(definition.update_order())
        self._scheduler = None
        self._rng = None
        self._properties = self._build_properties()

    # -- specs ----------------------------------------------------------------

    def action_spec(self) -> list[str]:
        return list(self._actions)

    def observation_spec(self, player: Optional[int] = None):
        if player is not None:
            return self.definition.observation_spec(player)
        return [self.definition.observation_spec(p) for p in range(self.num_players)]

    @property
    def world(self):
        if self._world is None:
            raise StateError("environment has not been reset")
        return self._world

    @property
    def status(self) -> str:
        return self._status

    @property
    def termination_reason(self) -> Optional[str]:
        return self._reason

    # -- episode driving --------------------------------------------------------

    def reset(self):
        if self._seed_mode == "fixed":
            episode_seed = self._base_seed
        else:
            episode_seed = derive_seed(self._base_seed, self.episode)
        self.episode += 1
        self._world = self.definition.build(self, episode_seed)
        self._scheduler = self._world.scheduler
        self._rng = self._world.rng
        self.steps = 0
        self._status = "running"
        self._reason = None
        return [self.definition.observe(self, p) for p in range(self.num_players)]

    def step(self, actions: Sequence[int]) -> StepResult:
        if self._status != "running":
            raise StateError(f"step() while {self._status}; call reset()")
        n = self.num_players
        if len(actions) != n:
            raise ConfigError(f"expected {n} actions, got {len(actions)}")
        n_act = self._n_actions
        for a in actions:
            if not 0 <= a < n_act:
                raise ConfigError(f"action {a} outside range 0..{n_act - 1}")
        rewards = self._step_rewards
        for i in range(n):
            rewards[i] = 0.0
        defn = self.definition
        order = self._order
        self._rng.shuffle(order)
        for p in order:
            if self._status != "running":
                break
            a = actions[p]
            if a:
                defn.apply_action(self, p, a)
        if self._status == "running":
            events = self._scheduler.tick(self._update_order)
            self.steps += 1
            defn.post_step(self)
        else:
            # Terminated mid-actions: remaining updaters are skipped, but
            # the step still counts and its events are delivered.
            events = self._scheduler.finish_step()
            self.steps += 1
        obs = [defn.observe(self, p) for p in range(n)]
        return StepResult(obs, list(rewards), events,
                          self._status == "terminated", self._reason)

    # -- hooks for environment logic ---------------------------------------------

    def add_reward(self, player: int, amount: float) -> None:
        self._step_rewards[player] += amount

    def terminate(self, reason: str) -> None:
        if self._status == "running":
            self._status = "terminated"
            self._reason = reason

    # -- properties tree -----------------------------------------------------------

    def _build_properties(self):
        entries: dict[str, tuple] = {
            "world/width": (lambda: str(self.world.width), None),
            "world/height": (lambda: str(self.world.height), None),
            "world/layers": (lambda: ",".join(self.world.layers), None),
            "env/players": (lambda: str(self.num_players), None),
            "env/steps": (lambda: str(self.steps), None),
            "env/episode": (lambda: str(self.episode), None),
            "env/seed": (lambda: str(self._base_seed), None),
        }
        for path, reader, writer in self.definition.property_entries():
            entries[path] = (reader, writer)
        return entries

    def read_property(self, path: str) -> str:
        entry = self._properties.get(path)
        if entry is None:
            raise NotFoundError(f"unknown property {path!r}")
        return entry[0]()

    def write_property(self, path: str, value: str) -> None:
        entry = self._properties.get(path)
        if entry is None:
            raise NotFoundError(f"unknown property {path!r}")
        if entry[1] is None:
            raise PermissionError(f"property {path!r} is read-only")
        entry[1](str(value))

    def property_paths(self) -> list[str]:
        return sorted(self._properties)


def make_env(definition, num_players: int, seed: int, **options) -> Env:
    """Construct an environment by name (e.g. ``"rws"``) or definition factory."""
    seed_mode = options.pop("seed_mode", "advance")
    kernel_name = options.pop("kernel_name", None)
    if isinstance(definition, str):
        factory = environment_factory(definition)
        definition = factory(**options)
    elif options:
        raise ConfigError("options are only accepted with a named environment")
    return Env(definition, num_players, seed, seed_mode=seed_mode,
               kernel_name=kernel_name)
