"""Sprite definitions: text format, pixel-grid rotation, render atlas.

Sprites are square character grids with a per-sprite palette, defined in
a plain text format (see :func:`parse_sprites`). Each sprite stores four
oriented bitmaps (one per cardinal orientation). By default the east,
south, and west variants are the base (north) bitmap rotated clockwise
by quarter turns; a sprite declared ``static`` stores the same bitmap
four times; explicit ``orient`` blocks override individual variants.

For rendering, every sprite is expanded into a 4x4 atlas over (piece
orientation, view rotation): plane ``d`` holds the bitmaps as they
appear in an egocentric window whose viewer faces direction ``d``
(counter-clockwise pixel rotation by ``d`` quarter turns). Palette
entries may map to ``transparent``; fully opaque tiles take a fast blit
path in the kernels.

Text grammar (one directive per line, ``#`` starts a comment line):

    tile <N>                     once, first; pixels per cell edge
    sprite <name> [static]      starts a sprite
    palette <char> <r> <g> <b>  per-sprite palette entry (0..255)
    palette <char> transparent
    base                         followed by N rows of N palette chars
    orient <north|east|south|west>   optional explicit variant rows
    end                          closes a base/orient block
"""

from __future__ import annotations

import numpy as np

from gridarena.errors import ConfigError

_ORIENT_NAMES = {"north": 0, "east": 1, "south": 2, "west": 3}


def rotate_cw(img: np.ndarray) -> np.ndarray:
    """Rotate a (T, T, ...) pixel grid a quarter turn clockwise on screen."""
    return np.ascontiguousarray(img.swapaxes(0, 1)[:, ::-1])


def rotate_ccw(img: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(img.swapaxes(0, 1)[::-1, :])


class SpriteSet:
    """An immutable set of oriented sprite bitmaps sharing one tile size."""

    def __init__(self, tile: int, names: dict[str, int], rgb: np.ndarray,
                 mask: np.ndarray, opaque: np.ndarray):
        self.tile = tile
        self._ids = names
        self.rgb = rgb        # uint8 [n, 4 orient, 4 view, T, T, 3]
        self.mask = mask      # uint8 [n, 4, 4, T, T]
        self.opaque = opaque  # uint8 [n, 4, 4]
        self._resolve_cache: dict[tuple, np.ndarray] = {}

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    @property
    def names(self) -> list[str]:
        return sorted(self._ids)

    @classmethod
    def build(cls, tile: int, sprites: dict[str, dict]) -> "SpriteSet":
        """Assemble from arrays: ``{name: {rgb, mask?, static?, orientations?}}``.

        ``rgb`` is (T, T, 3) uint8; ``mask`` (T, T) bool-ish, default all
        opaque; ``orientations`` maps orientation code to (rgb, mask)
        overrides.
        """
        n = len(sprites)
        rgb = np.zeros((n, 4, 4, tile, tile, 3), np.uint8)
        mask = np.zeros((n, 4, 4, tile, tile), np.uint8)
        opaque = np.zeros((n, 4, 4), np.uint8)
        names = {}
        for i, (name, spec) in enumerate(sprites.items()):
            names[name] = i
            base_rgb = np.asarray(spec["rgb"], np.uint8)
            if base_rgb.shape != (tile, tile, 3):
                raise ConfigError(f"sprite {name!r}: bitmap must be ({tile}, {tile}, 3)")
            base_mask = np.asarray(
                spec.get("mask", np.ones((tile, tile), bool))).astype(np.uint8)
            if spec.get("static"):
                oriented = [(base_rgb, base_mask)] * 4
            else:
                oriented = [(base_rgb, base_mask)]
                for _ in range(3):
                    r, m = oriented[-1]
                    oriented.append((rotate_cw(r), rotate_cw(m)))
            for o, over in (spec.get("orientations") or {}).items():
                om = np.asarray(over.get("mask", np.ones((tile, tile), bool))).astype(np.uint8)
                oriented[int(o)] = (np.asarray(over["rgb"], np.uint8), om)
            for o in range(4):
                # view-rotation plane d holds ccw^d of the oriented bitmap
                r, m = oriented[o]
                for d in range(4):
                    rgb[i, o, d] = r
                    mask[i, o, d] = m
                    opaque[i, o, d] = 1 if m.all() else 0
                    r = rotate_ccw(r)
                    m = rotate_ccw(m)
        return cls(tile, names, np.ascontiguousarray(rgb),
                   np.ascontiguousarray(mask), np.ascontiguousarray(opaque))

    def resolve(self, world) -> np.ndarray:
        """Map each world state index to a sprite id (-1 invisible, -2 missing)."""
        key = tuple(s.sprite for s in world._states)
        cached = self._resolve_cache.get(key)
        if cached is None:
            cached = np.empty(max(len(key), 1), np.int32)
            for i, name in enumerate(key):
                cached[i] = -1 if name == "" else self._ids.get(name, -2)
            self._resolve_cache[key] = cached
        return cached

    def sprite_name_for_state(self, world, state_idx: int) -> str:
        return world._states[state_idx].sprite


def parse_sprites(text: str) -> SpriteSet:
    """Parse the sprite definition text format (see module docstring)."""
    tile = None
    sprites: dict[str, dict] = {}
    current: dict | None = None
    rows_target: tuple[str, int] | None = None  # (kind, orientation)
    rows: list[list] = []

    def fail(lineno, msg):
        raise ConfigError(f"sprite text line {lineno}: {msg}")

    lines = text.splitlines()
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        stripped = line.strip()
        if rows_target is not None:
            if stripped == "end":
                if len(rows) != tile:
                    fail(lineno, f"expected {tile} pixel rows, got {len(rows)}")
                kind, orient = rows_target
                grid_rgb = np.zeros((tile, tile, 3), np.uint8)
                grid_mask = np.ones((tile, tile), bool)
                for y, row in enumerate(rows):
                    for x, ch in enumerate(row):
                        entry = current["palette"].get(ch)
                        if entry is None:
                            fail(lineno, f"character {ch!r} missing from palette")
                        if entry == "transparent":
                            grid_mask[y, x] = False
                        else:
                            grid_rgb[y, x] = entry
                if kind == "base":
                    current["rgb"] = grid_rgb
                    current["mask"] = grid_mask
                else:
                    current.setdefault("orientations", {})[orient] = {
                        "rgb": grid_rgb, "mask": grid_mask}
                rows_target = None
                rows = []
            else:
                if len(stripped) != tile:
                    fail(lineno, f"pixel row must be exactly {tile} characters")
                rows.append(stripped)
            continue
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if parts[0] == "tile":
            if tile is not None:
                fail(lineno, "duplicate tile directive")
            tile = int(parts[1])
            if tile < 1:
                fail(lineno, "tile size must be >= 1")
        elif parts[0] == "sprite":
            if tile is None:
                fail(lineno, "tile directive must come first")
            name = parts[1]
            if name in sprites:
                fail(lineno, f"duplicate sprite {name!r}")
            current = {"palette": {}, "static": "static" in parts[2:]}
            sprites[name] = current
        elif parts[0] == "palette":
            if current is None:
                fail(lineno, "palette outside a sprite")
            ch = parts[1]
            if len(ch) != 1:
                fail(lineno, "palette characters are single characters")
            if parts[2] == "transparent":
                current["palette"][ch] = "transparent"
            else:
                r, g, b = (int(v) for v in parts[2:5])
                for v in (r, g, b):
                    if not 0 <= v <= 255:
                        fail(lineno, "color components must be 0..255")
                current["palette"][ch] = (r, g, b)
        elif parts[0] == "base":
            if current is None:
                fail(lineno, "base outside a sprite")
            rows_target = ("base", 0)
        elif parts[0] == "orient":
            if current is None or "rgb" not in current:
                fail(lineno, "orient block requires a base block first")
            o = _ORIENT_NAMES.get(parts[1])
            if o is None:
                fail(lineno, f"unknown orientation {parts[1]!r}")
            rows_target = ("orient", o)
        else:
            fail(lineno, f"unknown directive {parts[0]!r}")
    if rows_target is not None:
        raise ConfigError("sprite text ended inside a pixel block")
    for name, spec in sprites.items():
        if "rgb" not in spec:
            raise ConfigError(f"sprite {name!r} has no base block")
    if tile is None:
        raise ConfigError("sprite text has no tile directive")
    return SpriteSet.build(tile, sprites)
