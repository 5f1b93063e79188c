"""Host-level environment definitions and the environment registry.

An environment definition owns everything level-specific: world
construction, callback wiring, per-player action application, rewards
(via ``env.add_reward``), termination (via ``env.terminate``), and
observations. The engine itself never assigns reward. One definition
instance belongs to exactly one :class:`~gridarena.env.Env`.
"""

from __future__ import annotations

import importlib
from typing import Callable

from gridarena.errors import ConfigError


class ObsSpec:
    """Shape and dtype of one named observation."""

    __slots__ = ("shape", "dtype")

    def __init__(self, shape: tuple[int, ...], dtype: str):
        self.shape = tuple(shape)
        self.dtype = dtype

    def __repr__(self):
        return f"ObsSpec(shape={self.shape}, dtype={self.dtype!r})"

    def __eq__(self, other):
        return (isinstance(other, ObsSpec)
                and self.shape == other.shape and self.dtype == other.dtype)


class EnvironmentDefinition:
    """Override points for a concrete environment."""

    name = "unnamed"

    def check_player_count(self, n: int) -> None:
        if n < 1:
            raise ConfigError("at least one player required")

    def action_names(self) -> list[str]:
        raise NotImplementedError

    def observation_spec(self, player: int) -> dict[str, ObsSpec]:
        raise NotImplementedError

    def build(self, env, seed: int):
        """Construct and return a fresh world for one episode."""
        raise NotImplementedError

    def update_order(self):
        return ()

    def apply_action(self, env, player: int, action: int) -> None:
        raise NotImplementedError

    def post_step(self, env) -> None:
        pass

    def observe(self, env, player: int) -> dict:
        raise NotImplementedError

    def property_entries(self):
        """Extra property-tree entries: (path, reader, writer-or-None)."""
        return ()


# Built-in definitions are imported lazily so `make_env("rws")` works
# without importing environment modules up front.
_BUILTIN_MODULES = {"rws": "gridarena.rws"}
_REGISTRY: dict[str, Callable[..., EnvironmentDefinition]] = {}


def register_environment(name: str, factory: Callable[..., EnvironmentDefinition]):
    if name in _REGISTRY:
        raise ConfigError(f"environment {name!r} already registered")
    _REGISTRY[name] = factory


def environment_factory(name: str) -> Callable[..., EnvironmentDefinition]:
    if name not in _REGISTRY and name in _BUILTIN_MODULES:
        importlib.import_module(_BUILTIN_MODULES[name])
    factory = _REGISTRY.get(name)
    if factory is None:
        raise ConfigError(f"unknown environment {name!r}")
    return factory


def environment_names() -> list[str]:
    return sorted(set(_REGISTRY) | set(_BUILTIN_MODULES))
