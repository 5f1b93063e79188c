"""Scripted policies for headless runs, benchmarks, and live sessions.

Policies: ``noop``, ``random``, ``collect-rock``, ``collect-paper``,
``collect-scissors`` (semi-pure: gather every reachable resource of one
type, then chase and zap), and ``hunter`` (grab a few nearby resources,
then chase and zap). Collectors and the hunter navigate by breadth-first
search over walkable cells and use privileged environment state; they
are test harness tools, not learned agents.

Bots are deterministic given their seed; ties break on a fixed
north/east/south/west neighbor order.
"""

from __future__ import annotations

from collections import deque

from gridarena.backend import get_kernel
from gridarena.errors import ConfigError
from gridarena.geometry import DIRECTIONS
from gridarena.rws import (
    BACKWARD,
    FIRE_BEAM,
    FORWARD,
    NOOP,
    RESOURCE_NAMES,
    STRAFE_LEFT,
    STRAFE_RIGHT,
    TURN_LEFT,
    TURN_RIGHT,
)
from gridarena.seeds import derive_seed

BOT_NAMES = ("noop", "random", "collect-rock", "collect-paper",
             "collect-scissors", "hunter")

_DIR_INDEX = {d: i for i, d in enumerate(DIRECTIONS)}

_MOVE_FOR_RELATIVE = {0: FORWARD, 1: STRAFE_RIGHT, 2: BACKWARD, 3: STRAFE_LEFT}


class Bot:
    name = "bot"

    def __init__(self, seed: int = 0):
        self.rng = get_kernel().Rng(seed)

    def reset(self, env, player: int) -> None:
        pass

    def act(self, env, player: int) -> int:
        return NOOP


class NoopBot(Bot):
    name = "noop"


class RandomBot(Bot):
    name = "random"

    def act(self, env, player: int) -> int:
        return self.rng.randrange(len(env.action_spec()))


def _walkable(core, upper, width, height, x, y):
    return 0 <= x < width and 0 <= y < height and core.occupant(upper, x, y) < 0


def _bfs_step(env, start, goals, avoid=frozenset()):
    """First move toward the nearest goal: returns (next_cell, goal) or None.

    If start is itself a goal, returns (start, start). Cells in ``avoid``
    are treated as impassable (they may still be goals).
    """
    if not goals:
        return None
    if start in goals:
        return (start, start)
    defn = env.definition
    core = defn._core
    upper = defn._upper
    w, h = env.world.width, env.world.height
    seen = {start}
    frontier = deque([start])
    came_from = {}
    while frontier:
        cell = frontier.popleft()
        for dx, dy in DIRECTIONS:
            nxt = (cell[0] + dx, cell[1] + dy)
            if nxt in seen:
                continue
            seen.add(nxt)
            if nxt in goals:
                came_from[nxt] = cell
                step = nxt
                while came_from[step] != start:
                    step = came_from[step]
                return (step, nxt)
            if nxt not in avoid and _walkable(core, upper, w, h, nxt[0], nxt[1]):
                came_from[nxt] = cell
                frontier.append(nxt)
    return None


def _move_action(orientation, here, there):
    d = _DIR_INDEX[(there[0] - here[0], there[1] - here[1])]
    return _MOVE_FOR_RELATIVE[(d - orientation) & 3]


def _turn_action(orientation, want):
    diff = (want - orientation) & 3
    return TURN_RIGHT if diff == 1 else TURN_LEFT


class _Navigator(Bot):
    """Shared collect/chase machinery."""

    collect_types: tuple[str, ...] = RESOURCE_NAMES
    collect_limit: int | None = None

    def _my_state(self, env, player):
        defn = env.definition
        pid = defn.avatars[player]
        core = defn._core
        return defn, core, pid, (core.piece_x(pid), core.piece_y(pid)), \
            core.piece_orientation(pid)

    def _opponent_zap_options(self, env, player):
        """(cell -> firing direction) for all beam positions on the opponent."""
        defn = env.definition
        core = defn._core
        me = defn.avatars[player]
        other = defn.avatars[1 - player]
        ox, oy = core.piece_x(other), core.piece_y(other)
        options = {}
        for d, (dx, dy) in enumerate(DIRECTIONS):
            for k in range(1, defn.beam_length + 1):
                x, y = ox + dx * k, oy + dy * k
                occ = core.occupant(defn._upper, x, y)
                if occ >= 0 and occ != me:
                    break  # wall or other blocker absorbs the beam
                if not (0 <= x < env.world.width and 0 <= y < env.world.height):
                    break
                options[(x, y)] = (d + 2) & 3  # fire back toward the opponent
        return options

    def _avoid_cells(self, env):
        """Cells holding resource types this bot does not collect."""
        defn = env.definition
        core = defn._core
        avoid = set()
        for rname in RESOURCE_NAMES:
            if rname in self.collect_types:
                continue
            for rpid in defn.remaining[rname]:
                avoid.add((core.piece_x(rpid), core.piece_y(rpid)))
        return avoid

    def _chase(self, env, player):
        defn, core, pid, pos, o = self._my_state(env, player)
        options = self._opponent_zap_options(env, player)
        if pos in options:
            want = options[pos]
            return FIRE_BEAM if o == want else _turn_action(o, want)
        # Occasional random step: two greedy chasers otherwise mirror each
        # other into a stable orbit and the episode times out.
        if self.rng.random() < 0.15:
            return self._wander(o)
        found = _bfs_step(env, pos, set(options), self._avoid_cells(env))
        if found is None:
            found = _bfs_step(env, pos, set(options))
        if found is None:
            return self._wander(o)
        step, _goal = found
        return _move_action(o, pos, step)

    def _collect(self, env, player):
        defn, core, pid, pos, o = self._my_state(env, player)
        goals = {}
        for rname in self.collect_types:
            for rpid in defn.remaining[rname]:
                goals[(core.piece_x(rpid), core.piece_y(rpid))] = rname
        if not goals:
            return None
        found = _bfs_step(env, pos, set(goals), self._avoid_cells(env))
        if found is None:
            found = _bfs_step(env, pos, set(goals))
        if found is None:
            return None
        step, _goal = found
        if step == pos:  # standing on it; pickup already fired
            return NOOP
        return _move_action(o, pos, step)

    def _wander(self, o):
        r = self.rng.randrange(8)
        if r < 4:
            return FORWARD
        if r < 6:
            return TURN_LEFT if r == 4 else TURN_RIGHT
        return _MOVE_FOR_RELATIVE[(r - 4) & 3]

    def act(self, env, player: int) -> int:
        defn = env.definition
        if self.collect_limit is None or sum(defn.counts[player]) < self.collect_limit:
            action = self._collect(env, player)
            if action is not None:
                return action
        return self._chase(env, player)


class CollectBot(_Navigator):
    """Semi-pure strategy: gather one resource type, then chase and zap."""

    def __init__(self, resource: str, seed: int = 0):
        super().__init__(seed)
        if resource not in RESOURCE_NAMES:
            raise ConfigError(f"unknown resource {resource!r}")
        self.collect_types = (resource,)
        self.name = f"collect-{resource}"


class HunterBot(_Navigator):
    """Grab the few nearest resources of any type, then chase and zap."""

    name = "hunter"
    collect_limit = 3


def make_bot(name: str, seed: int = 0) -> Bot:
    if name == "noop":
        return NoopBot(seed)
    if name == "random":
        return RandomBot(seed)
    if name == "hunter":
        return HunterBot(seed)
    if name.startswith("collect-"):
        return CollectBot(name.removeprefix("collect-"), seed)
    raise ConfigError(f"unknown bot policy {name!r}; choose from {BOT_NAMES}")


def make_bots(names, root_seed: int) -> list[Bot]:
    """One bot per player, each with a seed derived from the root."""
    return [make_bot(name, derive_seed(root_seed, 1000 + i))
            for i, name in enumerate(names)]
