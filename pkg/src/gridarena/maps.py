"""Text map format: a character grid plus a legend.

Format (``#`` lines are comments, blank lines ignored outside the map
block):

    legend <char> [<state> ...]     states spawned at cells with <char>,
                                    one per layer; no states = empty cell
    map                             followed by the rows, then:
    end

Rows must be equal length; every character must appear in the legend.
Legend glyphs are single non-space characters. Multi-state legend
entries spawn one piece per listed state at that cell (stacked layers).
"""

from __future__ import annotations

from dataclasses import dataclass

from gridarena.errors import ConfigError


@dataclass(frozen=True)
class ParsedMap:
    width: int
    height: int
    legend: dict[str, tuple[str, ...]]
    rows: tuple[str, ...]

    def spawn_into(self, world, orientation=0) -> dict[str, list[int]]:
        """Create all pieces row-major; returns piece ids per state name."""
        by_state: dict[str, list[int]] = {}
        for y, row in enumerate(self.rows):
            for x, ch in enumerate(row):
                for state in self.legend[ch]:
                    layer = world.state_descriptor(state).layer
                    pid = world.add_piece(state, (x, y, layer), orientation)
                    by_state.setdefault(state, []).append(pid)
        return by_state

    def cells_of(self, glyph: str) -> list[tuple[int, int]]:
        return [(x, y) for y, row in enumerate(self.rows)
                for x, ch in enumerate(row) if ch == glyph]


def parse_map_text(text: str) -> ParsedMap:
    legend: dict[str, tuple[str, ...]] = {}
    rows: list[str] = []
    in_map = False
    map_closed = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip()
        if in_map:
            if line.strip() == "end":
                in_map = False
                map_closed = True
            else:
                rows.append(line)
            continue
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if parts[0] == "legend":
            if len(parts) < 2 or len(parts[1]) != 1:
                raise ConfigError(f"map line {lineno}: legend needs a single glyph")
            if parts[1] in legend:
                raise ConfigError(f"map line {lineno}: duplicate glyph {parts[1]!r}")
            legend[parts[1]] = tuple(parts[2:])
        elif parts[0] == "map":
            in_map = True
        else:
            raise ConfigError(f"map line {lineno}: unknown directive {parts[0]!r}")
    if in_map or not map_closed:
        raise ConfigError("map block missing or not closed with 'end'")
    if not rows:
        raise ConfigError("map block is empty")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ConfigError(f"map row {i} has length {len(row)}, expected {width}")
        for ch in row:
            if ch not in legend:
                raise ConfigError(f"map character {ch!r} missing from legend")
    return ParsedMap(width, len(rows), legend, tuple(rows))
