"""Simulation ticks, callback dispatch, and the per-step event queue.

Behavior attaches to piece states as callbacks:

* ``on_update``: per group name, run when the group's entry in the tick
  order activates; members are snapshotted, sorted by piece id, then
  visited in a seeded-shuffled order.
* ``on_contact_enter`` / ``on_contact_leave``: per contact tag of the
  *other* piece, fired when two pieces on different layers come to
  share, or cease to share, an ``(x, y)`` cell. Leave events use the
  tags captured when the pair formed.
* ``on_hit``: per beam name, fired via :meth:`Scheduler.dispatch_hit`.
* ``on_state_enter`` / ``on_state_exit``: fired after a state change
  commits (the piece is already in its new state when both run).

Handlers receive ``(world, piece_id, ...)`` and may mutate the world
only through engine operations. A handler that raises, or a dispatch
chain deeper than :data:`MAX_CALLBACK_DEPTH`, aborts the tick with
:class:`~gridarena.errors.TickError`.

Events raised via :meth:`Scheduler.raise_event` are buffered and
returned (in raise order) by the tick that drains them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from gridarena.errors import ConfigError, TickError

MAX_CALLBACK_DEPTH = 64

_SCALAR = (str, int, float, bool)


@dataclass(frozen=True)
class EngineEvent:
    """A named event with a JSON-like payload, stamped with its tick index."""

    name: str
    payload: dict
    step: int


class UpdateOrder:
    """Ordered group activations for a tick; probability defaults to 1."""

    def __init__(self, entries: Sequence):
        self.entries: list[tuple[str, float]] = []
        for e in entries:
            if isinstance(e, str):
                self.entries.append((e, 1.0))
            else:
                group, p = e
                if not 0.0 <= p <= 1.0:
                    raise ConfigError(f"activation probability {p} outside [0, 1]")
                self.entries.append((group, float(p)))


def _check_payload(value, where: str):
    if value is None or isinstance(value, _SCALAR):
        return
    if isinstance(value, (list, tuple)):
        for v in value:
            _check_payload(v, where)
        return
    if isinstance(value, dict):
        for k, v in value.items():
            if not isinstance(k, str):
                raise ConfigError(f"{where}: payload keys must be strings")
            _check_payload(v, where)
        return
    raise ConfigError(f"{where}: unsupported payload value {value!r}")


class Scheduler:
    """Per-world callback registry and tick driver. Created by the world."""

    def __init__(self, world):
        self._world = world
        self._update: dict[tuple[int, int], Callable] = {}
        self._contact: dict[tuple[int, int, bool], Callable] = {}
        self._hit: dict[tuple[int, str], Callable] = {}
        self._state_enter: dict[int, Callable] = {}
        self._state_exit: dict[int, Callable] = {}
        self._events: list[EngineEvent] = []
        self._depth = 0
        self.steps = 0
        self.started = False
        world.core.set_dispatcher(self._on_contact)

    # -- registration --------------------------------------------------------

    def register(self, state: str, *,
                 on_update: Optional[Mapping[str, Callable]] = None,
                 on_contact_enter: Optional[Mapping[str, Callable]] = None,
                 on_contact_leave: Optional[Mapping[str, Callable]] = None,
                 on_hit: Optional[Mapping[str, Callable]] = None,
                 on_state_enter: Optional[Callable] = None,
                 on_state_exit: Optional[Callable] = None) -> None:
        if self.started:
            raise ConfigError("cannot register callbacks after the world started")
        w = self._world
        sidx = w._state_id(state)
        for group, fn in (on_update or {}).items():
            gid = w._group_index.get(group)
            if gid is None:
                raise ConfigError(f"unknown group {group!r}")
            self._put(self._update, (sidx, gid), fn, f"on_update[{group}]")
        for entering, table in ((True, on_contact_enter), (False, on_contact_leave)):
            for tag, fn in (table or {}).items():
                tid = w._tag_index.get(tag)
                if tid is None or tid == 0:
                    raise ConfigError(f"unknown contact tag {tag!r}")
                self._put(self._contact, (sidx, tid, entering), fn,
                          f"on_contact_{'enter' if entering else 'leave'}[{tag}]")
                w.core.set_handler_presence(sidx, tid, entering)
        for beam, fn in (on_hit or {}).items():
            self._put(self._hit, (sidx, beam), fn, f"on_hit[{beam}]")
        if on_state_enter is not None:
            self._put(self._state_enter, sidx, on_state_enter, "on_state_enter")
        if on_state_exit is not None:
            self._put(self._state_exit, sidx, on_state_exit, "on_state_exit")

    def _put(self, table, key, fn, label):
        if key in table:
            raise ConfigError(f"duplicate registration of {label}")
        table[key] = fn

    # -- events ---------------------------------------------------------------

    def raise_event(self, name: str, payload=None) -> None:
        payload = {} if payload is None else dict(payload)
        _check_payload(payload, f"event {name!r}")
        self._events.append(EngineEvent(name, payload, self.steps))

    def pending_events(self) -> list[EngineEvent]:
        return list(self._events)

    def drain_events(self) -> list[EngineEvent]:
        events = self._events
        self._events = []
        return events

    def finish_step(self) -> list[EngineEvent]:
        """Advance the tick counter without running updaters (terminal steps)."""
        self.started = True
        self.steps += 1
        return self.drain_events()

    # -- ticking ----------------------------------------------------------------

    def tick(self, order=()) -> list[EngineEvent]:
        self.started = True
        entries = order.entries if isinstance(order, UpdateOrder) \
            else UpdateOrder(order).entries
        if not entries:  # fast path: bookkeeping only
            self.steps += 1
            if not self._events:
                return []
            return self.drain_events()
        w = self._world
        rng = w.rng
        core = w.core
        for group, p in entries:
            gid = w._group_index.get(group)
            if gid is None:
                raise ConfigError(f"unknown group {group!r}")
            if p <= 0.0:
                continue
            if p < 1.0 and rng.random() >= p:
                continue
            members = sorted(w._members[gid])
            rng.shuffle(members)
            for pid in members:
                sidx = core.piece_state(pid)
                if gid not in w._state_groups[sidx]:
                    continue  # left the group mid-tick
                fn = self._update.get((sidx, gid))
                if fn is not None:
                    self._call(fn, f"on_update[{group}]", pid)
        self.steps += 1
        return self.drain_events()

    # -- dispatch ---------------------------------------------------------------

    def _call(self, fn, label, pid, *args):
        self._depth += 1
        try:
            if self._depth > MAX_CALLBACK_DEPTH:
                raise TickError(pid, label, RecursionError(
                    f"callback chain deeper than {MAX_CALLBACK_DEPTH}"))
            try:
                fn(self._world, pid, *args)
            except TickError:
                raise
            except Exception as exc:
                raise TickError(pid, label, exc) from exc
        finally:
            self._depth -= 1

    def _on_contact(self, receiver: int, other: int, tag_id: int, entering: bool):
        sidx = self._world.core.piece_state(receiver)
        fn = self._contact.get((sidx, tag_id, entering))
        if fn is not None:
            kind = "enter" if entering else "leave"
            self._call(fn, f"on_contact_{kind}", receiver, other)

    def dispatch_state_change(self, pid: int, old: str, new: str) -> None:
        w = self._world
        fn = self._state_exit.get(w._state_index[old])
        if fn is not None:
            self._call(fn, "on_state_exit", pid, old)
        fn = self._state_enter.get(w._state_index[new])
        if fn is not None:
            self._call(fn, "on_state_enter", pid, new)

    def dispatch_hit(self, pid: int, beam: str, source: int) -> None:
        sidx = self._world.core.piece_state(pid)
        fn = self._hit.get((sidx, beam))
        if fn is not None:
            self._call(fn, f"on_hit[{beam}]", pid, beam, source)

    # -- cloning ------------------------------------------------------------------

    def clone_for(self, world) -> "Scheduler":
        other = Scheduler.__new__(Scheduler)
        other._world = world
        other._update = self._update
        other._contact = self._contact
        other._hit = self._hit
        other._state_enter = self._state_enter
        other._state_exit = self._state_exit
        other._events = list(self._events)
        other._depth = 0
        other.steps = self.steps
        other.started = self.started
        world.core.set_dispatcher(other._on_contact)
        for (sidx, tid, entering) in self._contact:
            world.core.set_handler_presence(sidx, tid, entering)
        return other
