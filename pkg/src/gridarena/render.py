"""RGB frame rendering: the global (privileged) view and egocentric windows.

Rendering never mutates the world. Layers composite in registration
order (later layers over earlier), empty cells stay background black,
and transparent palette pixels let lower layers show through. Egocentric
windows are rotated so the viewer's facing direction points up, with the
viewer drawn at window cell (left, forward).

Both render calls accept an ``out`` buffer to reuse across steps; when
given, the returned frame's pixels alias it (valid until the next
render into the same buffer).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gridarena.errors import InvalidPiece, RenderError


@dataclass(frozen=True)
class WindowSpec:
    """Egocentric window extents in cells; RWS uses (3, 1, 2, 2)."""

    forward: int
    backward: int
    left: int
    right: int

    @property
    def cols(self) -> int:
        return self.left + self.right + 1

    @property
    def rows(self) -> int:
        return self.forward + self.backward + 1


class Frame:
    """An RGB pixel buffer plus the step it was rendered at."""

    __slots__ = ("width", "height", "pixels", "step")

    def __init__(self, pixels: np.ndarray, step: int = 0):
        self.pixels = pixels
        self.height, self.width = pixels.shape[:2]
        self.step = step

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()


def _out_buffer(out, h, w):
    if out is None:
        return np.zeros((h, w, 3), np.uint8)
    if out.shape != (h, w, 3) or out.dtype != np.uint8:
        raise ValueError(f"out buffer must be uint8 ({h}, {w}, 3)")
    return out


def render_global(world, sprites, out: np.ndarray | None = None,
                  step: int = 0) -> Frame:
    """Whole-world frame of (height*tile, width*tile) pixels."""
    t = sprites.tile
    buf = _out_buffer(out, world.height * t, world.width * t)
    table = sprites.resolve(world)
    bad = world.kernel.render_global(
        world.core, table, sprites.rgb, sprites.mask, sprites.opaque, t, buf)
    if bad >= 0:
        raise RenderError(
            f"sprite {world._states[bad].sprite!r} (state {world._states[bad].name!r}) "
            f"is not in the sprite set")
    return Frame(buf, step)


def render_window(world, sprites, viewer: int, spec: WindowSpec,
                  out: np.ndarray | None = None, step: int = 0) -> Frame:
    """Egocentric frame for ``viewer``; cells beyond the grid render black."""
    world._check_pid(viewer)
    if world.core.piece_x(viewer) < 0:
        raise InvalidPiece(f"viewer {viewer} is off the board")
    t = sprites.tile
    buf = _out_buffer(out, spec.rows * t, spec.cols * t)
    table = sprites.resolve(world)
    bad = world.kernel.render_window(
        world.core, table, sprites.rgb, sprites.mask, sprites.opaque, t,
        viewer, spec.forward, spec.backward, spec.left, spec.right, buf)
    if bad >= 0:
        raise RenderError(
            f"sprite {world._states[bad].sprite!r} (state {world._states[bad].name!r}) "
            f"is not in the sprite set")
    return Frame(buf, step)
