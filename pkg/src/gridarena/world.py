"""The layered grid world: pieces, states, movement, and occupancy.

A :class:`World` owns a rectangular grid of named layers. Pieces occupy
at most one ``(x, y, layer)`` cell each (or sit off-board), carry a
cardinal orientation, and are always in exactly one named state; the
state fixes layer, sprite, groups, and contact tag. All mutation goes
through the methods here, which keep the occupancy index and the piece
table consistent and fire contact callbacks on every share/unshare
transition of an ``(x, y)`` cell.

Worlds are single-owner: no internal locking, never share one mutably.
Run many independent worlds for parallelism.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from gridarena import scheduler as _scheduler_mod
from gridarena.backend import get_kernel
from gridarena.errors import ConfigError, InvalidPiece, PlacementBlocked, StateError
from gridarena.geometry import Move, Orientation, Turn


@dataclass(frozen=True)
class StateDescriptor:
    """A named piece state: layer binding, sprite, groups, contact tag."""

    name: str
    layer: str
    sprite: str = ""
    groups: tuple[str, ...] = ()
    contact: str = ""

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))


class PieceView(NamedTuple):
    id: int
    position: Optional[tuple[int, int, str]]
    orientation: Orientation
    state: str


class MoveResult(NamedTuple):
    moved: bool
    position: Optional[tuple[int, int]]


Position = tuple[int, int, str]


class World:
    """See module docstring. Construct via ``World(w, h, layers, states, seed)``."""

    def __init__(self, width: int, height: int, layers: Sequence[str],
                 states: Iterable[StateDescriptor], seed: int,
                 kernel_name: str | None = None):
        if width < 1 or height < 1:
            raise ConfigError("world dimensions must be >= 1")
        layers = list(layers)
        if len(set(layers)) != len(layers):
            raise ConfigError("duplicate layer name")
        if len(layers) > 64:
            raise ConfigError("at most 64 layers are supported")
        for name in layers:
            if not name:
                raise ConfigError("layer names must be non-empty")
        self._kernel = get_kernel(kernel_name)
        self._layers = layers
        self._layer_index = {name: i for i, name in enumerate(layers)}

        self._states: list[StateDescriptor] = []
        self._state_index: dict[str, int] = {}
        self._tag_index: dict[str, int] = {"": 0}
        self._group_index: dict[str, int] = {}
        state_layers: list[int] = []
        state_contacts: list[int] = []
        for sd in states:
            if sd.name in self._state_index:
                raise ConfigError(f"duplicate state name {sd.name!r}")
            if sd.layer not in self._layer_index:
                raise ConfigError(f"state {sd.name!r} references unknown layer {sd.layer!r}")
            self._state_index[sd.name] = len(self._states)
            self._states.append(sd)
            state_layers.append(self._layer_index[sd.layer])
            if sd.contact not in self._tag_index:
                self._tag_index[sd.contact] = len(self._tag_index)
            state_contacts.append(self._tag_index[sd.contact])
            for g in sd.groups:
                if g not in self._group_index:
                    self._group_index[g] = len(self._group_index)
        self._state_groups: list[frozenset[int]] = [
            frozenset(self._group_index[g] for g in sd.groups) for sd in self._states
        ]

        self._core = self._kernel.WorldCore(
            width, height, len(layers), state_layers, state_contacts)
        self.rng = self._kernel.Rng(seed)
        self._seed = int(seed)
        self._members: dict[int, set[int]] = {
            gid: set() for gid in self._group_index.values()}
        self.scheduler = _scheduler_mod.Scheduler(self)

    # -- introspection ------------------------------------------------------

    @property
    def width(self) -> int:
        return self._core.width

    @property
    def height(self) -> int:
        return self._core.height

    @property
    def layers(self) -> list[str]:
        return list(self._layers)

    @property
    def kernel(self):
        return self._kernel

    @property
    def core(self):
        return self._core

    def state_descriptor(self, name: str) -> StateDescriptor:
        return self._states[self._state_id(name)]

    def piece(self, pid: int) -> PieceView:
        self._check_pid(pid)
        x, y, layer, o, s = self._core.piece_tuple(pid)
        pos = (x, y, self._layers[layer]) if x >= 0 else None
        return PieceView(pid, pos, Orientation(o), self._states[s].name)

    def piece_count(self) -> int:
        return self._core.piece_count()

    def pieces_in_group(self, group: str) -> list[int]:
        gid = self._group_index.get(group)
        if gid is None:
            raise ConfigError(f"unknown group {group!r}")
        return sorted(self._members[gid])

    def occupant(self, layer: str, x: int, y: int) -> Optional[int]:
        pid = self._core.occupant(self._layer_id(layer), x, y)
        return None if pid < 0 else pid

    # -- piece lifecycle ----------------------------------------------------

    def add_piece(self, state: str, position: Optional[Position] = None,
                  orientation: Orientation = Orientation.NORTH) -> int:
        sidx = self._state_id(state)
        if position is not None:
            x, y = self._check_bounds(position)
            if position[2] != self._states[sidx].layer:
                raise ConfigError(
                    f"position layer {position[2]!r} does not match state layer "
                    f"{self._states[sidx].layer!r}")
            pid = self._core.add_piece(sidx, x, y, int(orientation))
            if pid < 0:
                raise PlacementBlocked(f"cell {position} is occupied")
        else:
            pid = self._core.add_piece(sidx, -1, -1, int(orientation))
        for gid in self._state_groups[sidx]:
            self._members[gid].add(pid)
        return pid

    def remove_piece(self, pid: int) -> None:
        self._check_pid(pid)
        self._core.remove(pid)

    def place_piece(self, pid: int, position: Position) -> bool:
        self._check_pid(pid)
        if self._core.piece_x(pid) >= 0:
            raise StateError(f"piece {pid} is already on the board")
        x, y = self._check_bounds(position)
        state = self._states[self._core.piece_state(pid)]
        if position[2] != state.layer:
            raise ConfigError(
                f"position layer {position[2]!r} does not match state layer "
                f"{state.layer!r}")
        return self._core.place(pid, x, y) == self._kernel.OK

    # -- movement and state -------------------------------------------------

    def move_piece(self, pid: int, move) -> MoveResult:
        """``move`` is a :class:`Move` or an absolute ``(dx, dy)`` offset."""
        self._check_pid(pid)
        if isinstance(move, Move):
            code = self._core.move_rel(pid, int(move))
        else:
            dx, dy = move
            code = self._core.move_abs(pid, int(dx), int(dy))
        if code == self._kernel.INVALID:
            raise InvalidPiece(f"piece {pid} is off the board")
        if code == self._kernel.OK:
            return MoveResult(True, (self._core.piece_x(pid), self._core.piece_y(pid)))
        return MoveResult(False, None)

    def turn_piece(self, pid: int, turn) -> Orientation:
        """``turn`` is a :class:`Turn` or an :class:`Orientation` to set."""
        self._check_pid(pid)
        if isinstance(turn, Turn):
            self._core.turn(pid, int(turn))
        else:
            self._core.set_orientation(pid, int(Orientation(turn)))
        return Orientation(self._core.piece_orientation(pid))

    def set_state(self, pid: int, state: str) -> bool:
        """Returns True when changed, False when blocked by occupancy."""
        self._check_pid(pid)
        new = self._state_id(state)
        old = self._core.piece_state(pid)
        code = self._core.set_state(pid, new)
        if code != self._kernel.OK:
            return False
        if new != old:
            for gid in self._state_groups[old] - self._state_groups[new]:
                self._members[gid].discard(pid)
            for gid in self._state_groups[new] - self._state_groups[old]:
                self._members[gid].add(pid)
            self.scheduler.dispatch_state_change(
                pid, self._states[old].name, self._states[new].name)
        return True

    # -- scheduler facade ---------------------------------------------------

    def register_callbacks(self, state: str, **tables) -> None:
        self.scheduler.register(state, **tables)

    def tick(self, order=()) -> list:
        return self.scheduler.tick(order)

    def raise_event(self, name: str, payload=None) -> None:
        self.scheduler.raise_event(name, payload)

    def dispatch_hit(self, pid: int, beam: str, source: int) -> None:
        self.scheduler.dispatch_hit(pid, beam, source)

    # -- determinism helpers ------------------------------------------------

    def state_hash(self) -> str:
        """SHA-256 over the full observable world state, for reproducibility checks."""
        h = hashlib.sha256()
        core = self._core
        h.update(f"{core.width},{core.height};".encode())
        h.update(";".join(self._layers).encode())
        h.update(";".join(s.name for s in self._states).encode())
        for pid in range(core.piece_count()):
            h.update(b"%d,%d,%d,%d,%d,%d;" % ((pid,) + core.piece_tuple(pid)))
        for item in core.contact_items():
            h.update(b"c%d,%d,%d,%d;" % item)
        h.update(b"r%d,%d;" % self.rng.getstate())
        h.update(b"t%d;" % self.scheduler.steps)
        for ev in self.scheduler.pending_events():
            h.update(json.dumps([ev.name, ev.payload, ev.step],
                                sort_keys=True).encode())
        return h.hexdigest()

    def clone(self, seed: int | None = None) -> "World":
        """Deep copy of the dynamic state; registries and callbacks are shared.

        With ``seed`` given, the copy starts a fresh RNG stream instead of
        continuing this world's (used to stamp out episode worlds from a
        prebuilt template).
        """
        other = World.__new__(World)
        other._kernel = self._kernel
        other._layers = self._layers
        other._layer_index = self._layer_index
        other._states = self._states
        other._state_index = self._state_index
        other._tag_index = self._tag_index
        other._group_index = self._group_index
        other._state_groups = self._state_groups
        other._core = self._core.clone()
        if seed is None:
            other.rng = self._kernel.Rng(0)
            other.rng.setstate(self.rng.getstate())
            other._seed = self._seed
        else:
            other.rng = self._kernel.Rng(seed)
            other._seed = int(seed)
        other._members = {gid: set(m) for gid, m in self._members.items()}
        other.scheduler = self.scheduler.clone_for(other)
        return other

    # -- internals ----------------------------------------------------------

    def _state_id(self, name: str) -> int:
        idx = self._state_index.get(name)
        if idx is None:
            raise ConfigError(f"unknown state {name!r}")
        return idx

    def _layer_id(self, name: str) -> int:
        idx = self._layer_index.get(name)
        if idx is None:
            raise ConfigError(f"unknown layer {name!r}")
        return idx

    def _check_pid(self, pid: int) -> None:
        if not (0 <= pid < self._core.piece_count()):
            raise InvalidPiece(f"unknown piece id {pid}")

    def _check_bounds(self, position: Position) -> tuple[int, int]:
        x, y, layer = position
        if layer not in self._layer_index:
            raise ConfigError(f"unknown layer {layer!r}")
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise ConfigError(f"position ({x}, {y}) outside {self.width}x{self.height} grid")
        return int(x), int(y)
