"""An independent, dictionary-based model of world semantics.

Used for differential testing: the same operation sequence is applied to
a real World and to this shadow, and every outcome plus the full
occupancy relation must agree. The shadow is written straight from the
documented rules (one piece per (x, y, layer), edges block, blocked ops
are no-ops, state changes fail only on resulting-position conflicts) and
never consults engine internals.
"""

DIRS = {0: (0, -1), 1: (1, 0), 2: (0, 1), 3: (-1, 0)}


class ShadowWorld:
    def __init__(self, width, height, layers, states):
        self.width = width
        self.height = height
        self.layers = list(layers)
        self.states = {s.name: s for s in states}
        self.occ = {}     # (x, y, layer) -> pid
        self.pieces = {}  # pid -> dict(x, y, orient, state); x is None when off-board

    def _layer(self, pid):
        return self.states[self.pieces[pid]["state"]].layer

    def sharing_pairs(self):
        """Directed (a, b) pairs currently sharing an (x, y) cell."""
        by_cell = {}
        for (x, y, _layer), pid in self.occ.items():
            by_cell.setdefault((x, y), []).append(pid)
        pairs = set()
        for pids in by_cell.values():
            for a in pids:
                for b in pids:
                    if a != b:
                        pairs.add((a, b))
        return pairs

    def add(self, pid, state, pos, orient):
        if pos is not None:
            x, y, layer = pos
            if (x, y, layer) in self.occ:
                return False
            self.occ[(x, y, layer)] = pid
            self.pieces[pid] = {"x": x, "y": y, "orient": orient, "state": state}
        else:
            self.pieces[pid] = {"x": None, "y": None, "orient": orient, "state": state}
        return True

    def move(self, pid, dx, dy):
        p = self.pieces[pid]
        if p["x"] is None:
            return "invalid"
        tx, ty = p["x"] + dx, p["y"] + dy
        if not (0 <= tx < self.width and 0 <= ty < self.height):
            return "blocked"
        if (tx, ty) == (p["x"], p["y"]):
            return "moved"
        layer = self._layer(pid)
        if (tx, ty, layer) in self.occ:
            return "blocked"
        del self.occ[(p["x"], p["y"], layer)]
        self.occ[(tx, ty, layer)] = pid
        p["x"], p["y"] = tx, ty
        return "moved"

    def move_rel(self, pid, mode):
        p = self.pieces[pid]
        if p["x"] is None:
            return "invalid"
        o = p["orient"]
        d = {0: o, 1: (o + 2) % 4, 2: (o + 3) % 4, 3: (o + 1) % 4}[mode]
        return self.move(pid, *DIRS[d])

    def turn(self, pid, mode):
        p = self.pieces[pid]
        p["orient"] = (p["orient"] + {0: 3, 1: 1, 2: 2}[mode]) % 4

    def set_orientation(self, pid, o):
        self.pieces[pid]["orient"] = o

    def set_state(self, pid, new_state):
        p = self.pieces[pid]
        old_layer = self._layer(pid)
        new_layer = self.states[new_state].layer
        if p["x"] is None:
            p["state"] = new_state
            return "changed"
        if new_layer != old_layer:
            if (p["x"], p["y"], new_layer) in self.occ:
                return "blocked"
            del self.occ[(p["x"], p["y"], old_layer)]
            self.occ[(p["x"], p["y"], new_layer)] = pid
        p["state"] = new_state
        return "changed"

    def remove(self, pid):
        p = self.pieces[pid]
        if p["x"] is not None:
            del self.occ[(p["x"], p["y"], self._layer(pid))]
            p["x"] = p["y"] = None

    def place(self, pid, x, y):
        p = self.pieces[pid]
        layer = self._layer(pid)
        if (x, y, layer) in self.occ:
            return "blocked"
        self.occ[(x, y, layer)] = pid
        p["x"], p["y"] = x, y
        return "placed"


def assert_world_matches_shadow(world, shadow):
    """Full-rebuild comparison of the occupancy relation and piece table."""
    for pid, p in shadow.pieces.items():
        view = world.piece(pid)
        if p["x"] is None:
            assert view.position is None, f"piece {pid} should be off-board"
        else:
            layer = shadow._layer(pid)
            assert view.position == (p["x"], p["y"], layer), f"piece {pid} position"
        assert int(view.orientation) == p["orient"], f"piece {pid} orientation"
        assert view.state == p["state"], f"piece {pid} state"
    for layer in shadow.layers:
        for y in range(shadow.height):
            for x in range(shadow.width):
                expect = shadow.occ.get((x, y, layer))
                assert world.occupant(layer, x, y) == expect, \
                    f"occupancy mismatch at ({x}, {y}, {layer})"
