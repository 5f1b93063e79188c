"""Geometric piece enumeration: first-hit raycasts and area queries.

All functions are read-only over a world. Results are deterministic:
area queries return pieces sorted by (y, x); raycasts traverse the
discretized segment nearest-first using the symmetric-error integer
line algorithm (cardinal and diagonal rays degenerate to the obvious
cell sequences).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from gridarena.errors import ConfigError


@dataclass(frozen=True)
class Disc:
    """Inclusive Euclidean disc: dx^2 + dy^2 <= radius^2."""

    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ConfigError("disc radius must be >= 0")


@dataclass(frozen=True)
class Diamond:
    """Inclusive L1 ball: |dx| + |dy| <= radius."""

    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ConfigError("diamond radius must be >= 0")


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned inclusive corner offsets relative to the anchor."""

    dx0: int
    dy0: int
    dx1: int
    dy1: int


class RaycastResult(NamedTuple):
    kind: str  # "hit" | "clear" | "out_of_bounds"
    piece: Optional[int]
    position: tuple[int, int]
    distance: int


def raycast(world, start: tuple[int, int, str], offset: tuple[int, int]) -> RaycastResult:
    """First piece on ``start``'s layer along the ray, start cell excluded."""
    x, y, layer = start
    dx, dy = offset
    if dx == 0 and dy == 0:
        raise ConfigError("raycast offset must be nonzero")
    if not (0 <= x < world.width and 0 <= y < world.height):
        raise ConfigError(f"raycast start ({x}, {y}) outside the grid")
    code, pid, cx, cy, dist = world.core.raycast(
        world._layer_id(layer), int(x), int(y), int(dx), int(dy))
    if code == world.kernel.RAY_HIT:
        return RaycastResult("hit", pid, (cx, cy), dist)
    if code == world.kernel.RAY_OOB:
        return RaycastResult("out_of_bounds", None, (cx, cy), dist)
    return RaycastResult("clear", None, (cx, cy), 0)


def query_area(world, layer: str, shape, center: tuple[int, int]):
    """All pieces on ``layer`` whose cell satisfies the shape predicate.

    Returns ``[(piece_id, (x, y)), ...]`` sorted by (y, x); cells outside
    the grid are skipped.
    """
    lid = world._layer_id(layer)
    cx, cy = int(center[0]), int(center[1])
    if not (0 <= cx < world.width and 0 <= cy < world.height):
        raise ConfigError(f"query center ({cx}, {cy}) outside the grid")
    core = world.core
    if isinstance(shape, Disc):
        raw = core.query_disc(lid, cx, cy, float(shape.radius))
    elif isinstance(shape, Diamond):
        raw = core.query_diamond(lid, cx, cy, int(shape.radius))
    elif isinstance(shape, Rectangle):
        x0, x1 = sorted((shape.dx0, shape.dx1))
        y0, y1 = sorted((shape.dy0, shape.dy1))
        raw = core.query_rect(lid, cx, cy, x0, y0, x1, y1)
    else:
        raise ConfigError(f"unknown area shape {shape!r}")
    return [(pid, (x, y)) for pid, x, y in raw]
