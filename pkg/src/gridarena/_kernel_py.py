"""Pure-Python engine core.

This module is the reference implementation of the hot kernels: the
deterministic RNG, the layered occupancy grid with contact bookkeeping,
first-hit raycasts, area queries, and the tile blitters. The compiled
core in ``gridarena._kernel`` mirrors it method for method; the
cross-backend test suite asserts identical behavior and the backend
module picks whichever is importable.

Coordinate and orientation conventions match ``gridarena.geometry``:
x east, y south, orientation codes N=0 E=1 S=2 W=3.
"""

BACKEND_NAME = "python"

# Operation result codes.
BLOCKED = 0
OK = 1
INVALID = 2

# Raycast result codes.
RAY_CLEAR = 0
RAY_HIT = 1
RAY_OOB = 2

_M64 = (1 << 64) - 1
_M32 = 0xFFFFFFFF
_PCG_MULT = 6364136223846793005

# (dx, dy) by orientation code.
_DIR_X = (0, 1, 0, -1)
_DIR_Y = (-1, 0, 1, 0)


def _seed_mix(root: int, index: int) -> int:
    # splitmix64 output function; keep in sync with gridarena.seeds.
    z = (root + (index + 1) * 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return (z ^ (z >> 31)) & _M64


class Rng:
    """PCG32 (XSH-RR output, 64-bit LCG state).

    Seeding: initstate/initseq are splitmix64 children 0 and 1 of the
    64-bit seed, then the standard pcg32 srandom sequence is applied.
    ``randrange`` uses unbiased rejection: draw 32-bit words until below
    ``2**32 - (2**32 % n)``, then reduce mod n. ``random`` maps one
    32-bit draw to [0, 1). ``shuffle`` is Fisher-Yates from the top
    index down. All backends implement exactly these steps so stream
    positions stay aligned.
    """

    __slots__ = ("_state", "_inc")

    def __init__(self, seed: int = 0):
        initstate = _seed_mix(int(seed) & _M64, 0)
        initseq = _seed_mix(int(seed) & _M64, 1)
        self._state = 0
        self._inc = ((initseq << 1) | 1) & _M64
        self.next_uint32()
        self._state = (self._state + initstate) & _M64
        self.next_uint32()

    def next_uint32(self) -> int:
        old = self._state
        self._state = (old * _PCG_MULT + self._inc) & _M64
        xorshifted = (((old >> 18) ^ old) >> 27) & _M32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & _M32

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange() bound must be positive")
        if n >= (1 << 32):
            raise ValueError("randrange() bound must fit in 32 bits")
        if n == 1:
            return 0
        limit = (1 << 32) - ((1 << 32) % n)
        r = self.next_uint32()
        while r >= limit:
            r = self.next_uint32()
        return r % n

    def random(self) -> float:
        return self.next_uint32() * 2.0**-32

    def shuffle(self, xs) -> None:
        for i in range(len(xs) - 1, 0, -1):
            j = self.randrange(i + 1)
            xs[i], xs[j] = xs[j], xs[i]

    def getstate(self) -> tuple[int, int]:
        return (self._state, self._inc)

    def setstate(self, state) -> None:
        self._state, self._inc = int(state[0]) & _M64, int(state[1]) & _M64


class WorldCore:
    """Layered occupancy grid plus the piece table.

    Works entirely in integer ids: layer indices, state indices, contact
    tag ids (0 = no tag). The owning wrapper maintains the string
    registries and translates. Contact pairs currently sharing an (x, y)
    cell are tracked in ``_contacts`` keyed by the ordered piece-id pair,
    storing each side's contact tag captured when the pair formed; leave
    notifications use the captured tags.

    ``dispatch`` (when set) is called as ``dispatch(receiver, other,
    tag_id, entering)`` for each affected piece whose partner has a
    nonzero tag, but only if ``(receiver_state, tag_id, entering)`` was
    marked via ``set_handler_presence`` — so worlds without handlers pay
    nothing on the hot path.
    """

    def __init__(self, width, height, num_layers, state_layers, state_contacts):
        self.width = int(width)
        self.height = int(height)
        self.num_layers = int(num_layers)
        self._state_layer = [int(v) for v in state_layers]
        self._state_contact = [int(v) for v in state_contacts]
        n = self.width * self.height
        self._occ = [[-1] * n for _ in range(self.num_layers)]
        self._px: list[int] = []
        self._py: list[int] = []
        self._pl: list[int] = []
        self._po: list[int] = []
        self._ps: list[int] = []
        self._contacts: dict[tuple[int, int], tuple[int, int]] = {}
        self._dispatch = None
        self._handler_keys: set[tuple[int, int, bool]] = set()

    # -- configuration hooks ------------------------------------------------

    def set_dispatcher(self, fn) -> None:
        self._dispatch = fn

    def set_handler_presence(self, state: int, tag: int, entering: bool) -> None:
        self._handler_keys.add((state, tag, bool(entering)))

    # -- accessors ----------------------------------------------------------

    def piece_count(self) -> int:
        return len(self._px)

    def piece_x(self, pid: int) -> int:
        return self._px[pid]

    def piece_y(self, pid: int) -> int:
        return self._py[pid]

    def piece_layer(self, pid: int) -> int:
        return self._pl[pid]

    def piece_orientation(self, pid: int) -> int:
        return self._po[pid]

    def piece_state(self, pid: int) -> int:
        return self._ps[pid]

    def piece_tuple(self, pid: int) -> tuple[int, int, int, int, int]:
        return (self._px[pid], self._py[pid], self._pl[pid],
                self._po[pid], self._ps[pid])

    def occupant(self, layer: int, x: int, y: int) -> int:
        if 0 <= x < self.width and 0 <= y < self.height:
            return self._occ[layer][y * self.width + x]
        return -1

    def contact_items(self):
        """Sorted snapshot of active contact pairs with captured tags."""
        return sorted((a, b, ta, tb) for (a, b), (ta, tb) in self._contacts.items())

    # -- contact plumbing ---------------------------------------------------

    def _maybe_dispatch(self, receiver, other, tag, entering):
        if tag and self._dispatch is not None and \
                (self._ps[receiver], tag, entering) in self._handler_keys:
            self._dispatch(receiver, other, tag, entering)

    def _begin_contact(self, a, b):
        key = (a, b) if a < b else (b, a)
        if key in self._contacts:
            return
        ta = self._state_contact[self._ps[key[0]]]
        tb = self._state_contact[self._ps[key[1]]]
        self._contacts[key] = (ta, tb)
        self._maybe_dispatch(key[0], key[1], tb, True)
        self._maybe_dispatch(key[1], key[0], ta, True)

    def _end_contact(self, a, b):
        key = (a, b) if a < b else (b, a)
        tags = self._contacts.pop(key, None)
        if tags is None:
            return
        self._maybe_dispatch(key[0], key[1], tags[1], False)
        self._maybe_dispatch(key[1], key[0], tags[0], False)

    def _partners(self, pid, x, y):
        cell = y * self.width + x
        me = self._pl[pid]
        out = []
        for layer in range(self.num_layers):
            if layer == me:
                continue
            q = self._occ[layer][cell]
            if q >= 0 and q != pid:
                out.append(q)
        return out

    def _enter_flow(self, pid):
        x0 = self._px[pid]
        y0 = self._py[pid]
        cell = y0 * self.width + x0
        for layer in range(self.num_layers):
            # Callbacks may relocate the piece mid-flow; stop if it left.
            if self._px[pid] != x0 or self._py[pid] != y0:
                break
            if layer == self._pl[pid]:
                continue
            q = self._occ[layer][cell]
            if q >= 0 and q != pid:
                self._begin_contact(pid, q)

    # -- piece lifecycle ----------------------------------------------------

    def add_piece(self, state: int, x: int, y: int, orient: int) -> int:
        """Create a piece; x < 0 means off-board. Returns pid or -1 if blocked."""
        layer = self._state_layer[state]
        if x >= 0:
            if self._occ[layer][y * self.width + x] >= 0:
                return -1
        pid = len(self._px)
        self._px.append(x if x >= 0 else -1)
        self._py.append(y if x >= 0 else -1)
        self._pl.append(layer)
        self._po.append(orient & 3)
        self._ps.append(state)
        if x >= 0:
            self._occ[layer][y * self.width + x] = pid
            self._enter_flow(pid)
        return pid

    def remove(self, pid: int) -> int:
        if pid < 0 or pid >= len(self._px):
            return INVALID
        x = self._px[pid]
        if x < 0:
            return OK
        y = self._py[pid]
        partners = self._partners(pid, x, y)
        self._occ[self._pl[pid]][y * self.width + x] = -1
        self._px[pid] = -1
        self._py[pid] = -1
        for q in partners:
            self._end_contact(pid, q)
        return OK

    def place(self, pid: int, x: int, y: int) -> int:
        if pid < 0 or pid >= len(self._px):
            return INVALID
        layer = self._pl[pid]
        if self._occ[layer][y * self.width + x] >= 0:
            return BLOCKED
        self._px[pid] = x
        self._py[pid] = y
        self._occ[layer][y * self.width + x] = pid
        self._enter_flow(pid)
        return OK

    # -- movement and state -------------------------------------------------

    def _move_to(self, pid, tx, ty):
        if tx < 0 or tx >= self.width or ty < 0 or ty >= self.height:
            return BLOCKED
        x = self._px[pid]
        y = self._py[pid]
        if tx == x and ty == y:
            return OK
        layer = self._pl[pid]
        if self._occ[layer][ty * self.width + tx] >= 0:
            return BLOCKED
        partners = self._partners(pid, x, y)
        self._occ[layer][y * self.width + x] = -1
        self._occ[layer][ty * self.width + tx] = pid
        self._px[pid] = tx
        self._py[pid] = ty
        for q in partners:
            self._end_contact(pid, q)
        self._enter_flow(pid)
        return OK

    def move_rel(self, pid: int, mode: int) -> int:
        """mode: 0 forward, 1 backward, 2 strafe-left, 3 strafe-right."""
        if pid < 0 or pid >= len(self._px):
            return INVALID
        x = self._px[pid]
        if x < 0:
            return INVALID
        o = self._po[pid]
        if mode == 0:
            d = o
        elif mode == 1:
            d = (o + 2) & 3
        elif mode == 2:
            d = (o + 3) & 3
        else:
            d = (o + 1) & 3
        return self._move_to(pid, x + _DIR_X[d], self._py[pid] + _DIR_Y[d])

    def move_abs(self, pid: int, dx: int, dy: int) -> int:
        if pid < 0 or pid >= len(self._px):
            return INVALID
        x = self._px[pid]
        if x < 0:
            return INVALID
        return self._move_to(pid, x + dx, self._py[pid] + dy)

    def turn(self, pid: int, mode: int) -> int:
        """mode: 0 left, 1 right, 2 about. Valid for off-board pieces too."""
        if pid < 0 or pid >= len(self._px):
            return INVALID
        if mode == 0:
            self._po[pid] = (self._po[pid] + 3) & 3
        elif mode == 1:
            self._po[pid] = (self._po[pid] + 1) & 3
        else:
            self._po[pid] = (self._po[pid] + 2) & 3
        return OK

    def set_orientation(self, pid: int, orient: int) -> int:
        if pid < 0 or pid >= len(self._px):
            return INVALID
        self._po[pid] = orient & 3
        return OK

    def set_state(self, pid: int, new_state: int) -> int:
        if pid < 0 or pid >= len(self._px):
            return INVALID
        old = self._ps[pid]
        if new_state == old:
            return OK
        x = self._px[pid]
        if x < 0:
            self._ps[pid] = new_state
            self._pl[pid] = self._state_layer[new_state]
            return OK
        old_layer = self._state_layer[old]
        new_layer = self._state_layer[new_state]
        if old_layer != new_layer:
            cell = self._py[pid] * self.width + x
            if self._occ[new_layer][cell] >= 0:
                return BLOCKED
            # Same (x, y): the set of co-located partners is unchanged,
            # so no contact events fire on a layer move.
            self._occ[old_layer][cell] = -1
            self._occ[new_layer][cell] = pid
            self._pl[pid] = new_layer
        self._ps[pid] = new_state
        return OK

    # -- spatial queries ----------------------------------------------------

    def raycast(self, layer: int, x0: int, y0: int, dx: int, dy: int):
        """First occupied cell from (x0, y0) toward (x0+dx, y0+dy).

        Symmetric-error Bresenham traversal over every cell of the
        discretized segment, nearest first, start cell excluded.
        Returns (code, pid, x, y, distance) where distance counts
        traversal steps (Chebyshev-1 each).
        """
        x1 = x0 + dx
        y1 = y0 + dy
        adx = dx if dx >= 0 else -dx
        ady = dy if dy >= 0 else -dy
        sx = 1 if dx > 0 else (-1 if dx < 0 else 0)
        sy = 1 if dy > 0 else (-1 if dy < 0 else 0)
        err = adx - ady
        occ = self._occ[layer]
        x, y = x0, y0
        dist = 0
        while True:
            e2 = 2 * err
            if e2 >= -ady:
                if x == x1:
                    return (RAY_CLEAR, -1, x1, y1, 0)
                err -= ady
                x += sx
            if e2 <= adx:
                if y == y1:
                    return (RAY_CLEAR, -1, x1, y1, 0)
                err += adx
                y += sy
            dist += 1
            if x < 0 or x >= self.width or y < 0 or y >= self.height:
                return (RAY_OOB, -1, x, y, dist)
            pid = occ[y * self.width + x]
            if pid >= 0:
                return (RAY_HIT, pid, x, y, dist)

    def _scan_box(self, layer, x_lo, x_hi, y_lo, y_hi, pred):
        out = []
        occ = self._occ[layer]
        x_lo = max(x_lo, 0)
        y_lo = max(y_lo, 0)
        x_hi = min(x_hi, self.width - 1)
        y_hi = min(y_hi, self.height - 1)
        for y in range(y_lo, y_hi + 1):
            row = y * self.width
            for x in range(x_lo, x_hi + 1):
                if pred(x, y):
                    pid = occ[row + x]
                    if pid >= 0:
                        out.append((pid, x, y))
        return out

    def query_disc(self, layer: int, cx: int, cy: int, radius: float):
        r2 = float(radius) * float(radius)
        r = int(radius) + 1
        return self._scan_box(
            layer, cx - r, cx + r, cy - r, cy + r,
            lambda x, y: (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r2)

    def query_diamond(self, layer: int, cx: int, cy: int, radius: int):
        return self._scan_box(
            layer, cx - radius, cx + radius, cy - radius, cy + radius,
            lambda x, y: abs(x - cx) + abs(y - cy) <= radius)

    def query_rect(self, layer: int, cx: int, cy: int, dx0: int, dy0: int,
                   dx1: int, dy1: int):
        return self._scan_box(layer, cx + dx0, cx + dx1, cy + dy0, cy + dy1,
                              lambda x, y: True)

    # -- cloning ------------------------------------------------------------

    def clone(self) -> "WorldCore":
        other = WorldCore.__new__(WorldCore)
        other.width = self.width
        other.height = self.height
        other.num_layers = self.num_layers
        other._state_layer = self._state_layer
        other._state_contact = self._state_contact
        other._occ = [row[:] for row in self._occ]
        other._px = self._px[:]
        other._py = self._py[:]
        other._pl = self._pl[:]
        other._po = self._po[:]
        other._ps = self._ps[:]
        other._contacts = dict(self._contacts)
        other._dispatch = None
        other._handler_keys = set(self._handler_keys)
        return other


def render_global(core, state_sprite, rgb, mask, opaque, tile, out):
    """Composite every on-board piece into ``out`` (H*tile, W*tile, 3).

    ``state_sprite`` maps state index -> sprite id (-1 invisible,
    -2 missing). Layers composite in index order. Returns -1 on success
    or the offending state index when a missing sprite was needed.
    """
    out[:] = 0
    w = core.width
    for layer in range(core.num_layers):
        occ = core._occ[layer]
        for cell, pid in enumerate(occ):
            if pid < 0:
                continue
            sid = state_sprite[core._ps[pid]]
            if sid == -1:
                continue
            if sid == -2:
                return core._ps[pid]
            y, x = divmod(cell, w)
            _blit(rgb, mask, opaque, sid, core._po[pid], 0, tile,
                  out, y * tile, x * tile)
    return -1


def render_window(core, state_sprite, rgb, mask, opaque, tile, viewer,
                  fwd, back, left, right, out):
    """Egocentric window for ``viewer``, rotated so its facing points up.

    Window cell (wx, wy) maps to the world cell ``viewer + (wx - left) *
    R(d) + (fwd - wy) * F(d)`` with d the viewer orientation; sprites use
    the view-rotation atlas plane d. Out-of-grid cells stay background.
    """
    out[:] = 0
    d = core._po[viewer]
    vx = core._px[viewer]
    vy = core._py[viewer]
    fx, fy = _DIR_X[d], _DIR_Y[d]
    rx, ry = _DIR_X[(d + 1) & 3], _DIR_Y[(d + 1) & 3]
    w = core.width
    h = core.height
    cols = left + right + 1
    rows = fwd + back + 1
    for layer in range(core.num_layers):
        occ = core._occ[layer]
        for wy in range(rows):
            beta = fwd - wy
            for wx in range(cols):
                alpha = wx - left
                gx = vx + alpha * rx + beta * fx
                gy = vy + alpha * ry + beta * fy
                if gx < 0 or gx >= w or gy < 0 or gy >= h:
                    continue
                pid = occ[gy * w + gx]
                if pid < 0:
                    continue
                sid = state_sprite[core._ps[pid]]
                if sid == -1:
                    continue
                if sid == -2:
                    return core._ps[pid]
                _blit(rgb, mask, opaque, sid, core._po[pid], d, tile,
                      out, wy * tile, wx * tile)
    return -1


def _blit(rgb, mask, opaque, sid, orient, vrot, tile, out, oy, ox):
    src = rgb[sid, orient, vrot]
    if opaque[sid, orient, vrot]:
        out[oy:oy + tile, ox:ox + tile] = src
    else:
        m = mask[sid, orient, vrot].astype(bool)
        region = out[oy:oy + tile, ox:ox + tile]
        region[m] = src[m]
