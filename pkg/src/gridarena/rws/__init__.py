"""Running With Scissors: spatial rock-paper-scissors for two players.

Agents roam a walled 24x16 map collecting rock, paper, and scissors
resources. Each pickup commits the collector more strongly to that pure
strategy: with pseudo-counts, the commitment vector is
``v_i = (1 + n_i) / (3 + n_total)``, starting at the simplex centroid.
Firing the interaction beam at the opponent resolves the embedded
matrix game: the zapper is the row player, the zapped the column
player, and rewards are ``r_row = v_row' A v_col = -r_col`` with the
cyclic payoff matrix A (rock < paper < scissors < rock). The episode
ends on the first interaction or when the step timer runs out.

Observations per player: an 80x80x3 egocentric RGB window (5x5 cells of
16px tiles; 3 rows ahead, 1 behind, 2 to each side) plus the player's
own resource counts. Actions: noop, forward, backward, strafe-left,
strafe-right, turn-left, turn-right, fire-beam.
"""

from __future__ import annotations

from importlib import resources as _resources

import numpy as np

from gridarena.definition import EnvironmentDefinition, ObsSpec, register_environment
from gridarena.errors import ConfigError
from gridarena.geometry import DIRECTIONS, Orientation
from gridarena.maps import parse_map_text
from gridarena.render import WindowSpec, render_window
from gridarena.sprites import parse_sprites
from gridarena.world import StateDescriptor, World

RESOURCE_NAMES = ("rock", "paper", "scissors")

ACTION_NAMES = ["noop", "forward", "backward", "strafe-left", "strafe-right",
                "turn-left", "turn-right", "fire-beam"]
NOOP, FORWARD, BACKWARD, STRAFE_LEFT, STRAFE_RIGHT, TURN_LEFT, TURN_RIGHT, \
    FIRE_BEAM = range(8)

LAYERS = ["logic", "lowerPhysical", "upperPhysical", "overlay"]

# Antisymmetric cyclic payoff; rows/columns ordered rock, paper, scissors.
PAYOFF_MATRIX = np.array([[0, -1, 1],
                          [1, 0, -1],
                          [-1, 1, 0]], dtype=np.float64)

_SIMPLEX_TOL = 1e-9


def commitment(counts) -> np.ndarray:
    """Strategy commitment on the 2-simplex from resource counts.

    Laplace pseudo-counts: v_i = (1 + n_i) / (3 + sum(n)); zero counts
    give the centroid and every component stays positive.
    """
    n0, n1, n2 = counts
    total = 3.0 + n0 + n1 + n2
    return np.array([(1.0 + n0) / total, (1.0 + n1) / total, (1.0 + n2) / total])


def _check_simplex(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (3,):
        raise ConfigError("strategy vector must have three components")
    if (v < -1e-12).any() or abs(float(v.sum()) - 1.0) > _SIMPLEX_TOL:
        raise ConfigError(f"{v.tolist()} is not on the 2-simplex")
    return v


def resolve_interaction(v_row, v_col) -> tuple[float, float]:
    """Rewards (r_row, r_col) for an interaction; exactly zero-sum."""
    v_row = _check_simplex(v_row)
    v_col = _check_simplex(v_col)
    r_row = float(v_row @ PAYOFF_MATRIX @ v_col)
    return r_row, -r_row


def default_map_text() -> str:
    return _resources.files(__package__).joinpath("data/map.txt").read_text()


def default_sprite_text() -> str:
    return _resources.files(__package__).joinpath("data/sprites.txt").read_text()


class RunningWithScissors(EnvironmentDefinition):
    """Environment definition; one instance per Env."""

    name = "rws"

    def __init__(self, map_text: str | None = None, sprite_text: str | None = None,
                 timer: int = 1000, beam_length: int = 3, beam_width: int = 1,
                 window: WindowSpec = WindowSpec(3, 1, 2, 2),
                 spawn_orientations=(Orientation.SOUTH, Orientation.NORTH),
                 observations: str = "rgb", strict_size: bool = True):
        if observations not in ("rgb", "none"):
            raise ConfigError(f"unknown observation mode {observations!r}")
        self.map = parse_map_text(map_text if map_text is not None
                                  else default_map_text())
        if strict_size and (self.map.width, self.map.height) != (24, 16):
            raise ConfigError(
                f"rws maps are 24x16 cells, got {self.map.width}x{self.map.height}")
        self.sprites = parse_sprites(sprite_text if sprite_text is not None
                                     else default_sprite_text())
        self.timer = int(timer)
        self.beam_length = int(beam_length)
        self.beam_width = int(beam_width)
        if self.timer < 1 or self.beam_length < 1 or self.beam_width < 1:
            raise ConfigError("timer, beam length, and beam width must be >= 1")
        self.window = window
        self.spawn_orientations = tuple(
            Orientation[o.upper()] if isinstance(o, str) else Orientation(o)
            for o in spawn_orientations)
        self.rgb = observations == "rgb"
        t = self.sprites.tile
        self._frame_bufs = [
            np.zeros((window.rows * t, window.cols * t, 3), np.uint8)
            for _ in range(2)]
        self._env = None
        self._template = None

    # -- static specs ---------------------------------------------------------

    def check_player_count(self, n: int) -> None:
        if n != 2:
            raise ConfigError("running-with-scissors takes exactly 2 players")

    def action_names(self) -> list[str]:
        return list(ACTION_NAMES)

    def observation_spec(self, player: int) -> dict[str, ObsSpec]:
        if not self.rgb:
            return {}
        t = self.sprites.tile
        return {
            "RGB": ObsSpec((self.window.rows * t, self.window.cols * t, 3), "uint8"),
            "INVENTORY": ObsSpec((3,), "int32"),
        }

    @staticmethod
    def state_descriptors() -> list[StateDescriptor]:
        return [
            StateDescriptor("floor", "logic", sprite="floor"),
            StateDescriptor("spawnA", "logic", sprite="floor"),
            StateDescriptor("spawnB", "logic", sprite="floor"),
            StateDescriptor("rock", "lowerPhysical", sprite="rock"),
            StateDescriptor("paper", "lowerPhysical", sprite="paper"),
            StateDescriptor("scissors", "lowerPhysical", sprite="scissors"),
            StateDescriptor("wall", "upperPhysical", sprite="wall"),
            StateDescriptor("avatar0", "upperPhysical", sprite="avatar0",
                            groups=("avatars",), contact="avatar"),
            StateDescriptor("avatar1", "upperPhysical", sprite="avatar1",
                            groups=("avatars",), contact="avatar"),
            StateDescriptor("spent", "overlay"),
        ]

    # -- episode construction ----------------------------------------------------

    def _build_template(self, env) -> World:
        """One fully populated, callback-wired world; episodes clone it."""
        world = World(self.map.width, self.map.height, LAYERS,
                      self.state_descriptors(), 0,
                      kernel_name=getattr(env, "kernel_name", None))
        by_state = self.map.spawn_into(world)
        spawns = [by_state.get("spawnA", []), by_state.get("spawnB", [])]
        if len(spawns[0]) != 1 or len(spawns[1]) != 1:
            raise ConfigError("rws maps need exactly one spawnA and one spawnB")
        self.avatars = []
        self.player_of = {}
        for player, (spawn_pid, state) in enumerate(
                zip((spawns[0][0], spawns[1][0]), ("avatar0", "avatar1"))):
            x, y, _layer = world.piece(spawn_pid).position
            pid = world.add_piece(state, (x, y, "upperPhysical"),
                                  self.spawn_orientations[player])
            self.avatars.append(pid)
            self.player_of[pid] = player
        self._template_resources = {name: tuple(by_state.get(name, ()))
                                    for name in RESOURCE_NAMES}
        for rname in RESOURCE_NAMES:
            world.register_callbacks(rname, on_contact_enter={"avatar": self._pickup})
        world.register_callbacks("avatar0", on_hit={"zap": self._on_zapped})
        world.register_callbacks("avatar1", on_hit={"zap": self._on_zapped})
        self._upper = world._layer_id("upperPhysical")
        return world

    def build(self, env, seed: int) -> World:
        self._env = env
        if self._template is None:
            self._template = self._build_template(env)
        world = self._template.clone(seed=seed)
        self.counts = [[0, 0, 0], [0, 0, 0]]
        self.inventory = [np.zeros(3, np.int32), np.zeros(3, np.int32)]
        self.remaining = {name: set(pids)
                          for name, pids in self._template_resources.items()}
        self._core = world.core
        self._world = world
        return world

    # -- stepping ------------------------------------------------------------------

    def apply_action(self, env, player: int, action: int) -> None:
        pid = self.avatars[player]
        core = self._core
        if action <= STRAFE_RIGHT:
            core.move_rel(pid, action - 1)
        elif action == TURN_LEFT:
            core.turn(pid, 0)
        elif action == TURN_RIGHT:
            core.turn(pid, 1)
        elif action == FIRE_BEAM:
            self._fire(env, pid)

    def post_step(self, env) -> None:
        if env.steps >= self.timer:
            env.terminate("timer")

    def observe(self, env, player: int) -> dict:
        if not self.rgb:
            return {}
        frame = render_window(self._world, self.sprites, self.avatars[player],
                              self.window, out=self._frame_bufs[player],
                              step=env.steps)
        return {"RGB": frame.pixels, "INVENTORY": self.inventory[player]}

    # -- beam and interaction ---------------------------------------------------------

    def _beam_columns(self):
        half = (self.beam_width - 1) // 2
        offsets = [0]
        for k in range(1, half + 1):
            offsets.extend((-k, k))
        return offsets[:self.beam_width]

    def _fire(self, env, zapper: int) -> None:
        core = self._core
        x0 = core.piece_x(zapper)
        y0 = core.piece_y(zapper)
        o = core.piece_orientation(zapper)
        fx, fy = DIRECTIONS[o]
        if self.beam_width == 1:
            code, hit, _x, _y, _d = core.raycast(
                self._upper, x0, y0, fx * self.beam_length, fy * self.beam_length)
            if code == 1 and hit in self.player_of:  # 1 == RAY_HIT
                self._world.dispatch_hit(hit, "zap", zapper)
            return
        rx, ry = DIRECTIONS[(o + 1) & 3]
        offsets = self._beam_columns()
        blocked = [False] * len(offsets)
        # Distance-major march, center column first: the nearest avatar in
        # an unblocked column within beam length is hit; walls absorb.
        for dist in range(1, self.beam_length + 1):
            for i, off in enumerate(offsets):
                if blocked[i]:
                    continue
                x = x0 + dist * fx + off * rx
                y = y0 + dist * fy + off * ry
                hit = core.occupant(self._upper, x, y)
                if hit < 0:
                    if not (0 <= x < self._world.width and 0 <= y < self._world.height):
                        blocked[i] = True
                    continue
                if hit in self.player_of:
                    self._world.dispatch_hit(hit, "zap", zapper)
                    return
                blocked[i] = True

    def _on_zapped(self, world, target: int, beam: str, source: int) -> None:
        env = self._env
        row_p = self.player_of[source]
        col_p = self.player_of[target]
        v_row = commitment(self.counts[row_p])
        v_col = commitment(self.counts[col_p])
        r_row, r_col = resolve_interaction(v_row, v_col)
        env.add_reward(row_p, r_row)
        env.add_reward(col_p, r_col)
        world.raise_event("interaction", {
            "row_player": row_p, "col_player": col_p,
            "v_row": [float(v) for v in v_row],
            "v_col": [float(v) for v in v_col],
            "r_row": r_row, "r_col": r_col,
        })
        env.terminate("interaction")

    def _pickup(self, world, resource: int, avatar: int) -> None:
        state = world.piece(resource).state
        if state not in RESOURCE_NAMES:
            return  # already consumed
        player = self.player_of.get(avatar)
        if player is None:
            return
        idx = RESOURCE_NAMES.index(state)
        self.counts[player][idx] += 1
        self.inventory[player][idx] += 1
        world.set_state(resource, "spent")
        self.remaining[state].discard(resource)

    # -- properties ---------------------------------------------------------------------

    def property_entries(self):
        def int_writer(attr, minimum=1):
            def write(value):
                try:
                    v = int(value)
                except ValueError as exc:
                    raise ConfigError(f"expected an integer, got {value!r}") from exc
                if v < minimum:
                    raise ConfigError(f"value must be >= {minimum}")
                setattr(self, attr, v)
            return write

        return [
            ("rws/timer", lambda: str(self.timer), int_writer("timer")),
            ("rws/beam_length", lambda: str(self.beam_length),
             int_writer("beam_length")),
            ("rws/beam_width", lambda: str(self.beam_width),
             int_writer("beam_width")),
            ("rws/resources_remaining",
             lambda: ",".join(str(len(self.remaining[n])) for n in RESOURCE_NAMES),
             None),
        ]


register_environment("rws", RunningWithScissors)
