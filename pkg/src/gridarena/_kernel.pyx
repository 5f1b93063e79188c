# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled engine core (Cython twin of gridarena._kernel_py).

Same classes, same methods, same semantics; the cross-backend tests
compare the two step for step. Hot paths (movement, raycast, blits)
run as plain C loops over flat int arrays.
"""

from libc.stdint cimport int32_t, int8_t, uint8_t, uint32_t, uint64_t
from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcpy, memset

BACKEND_NAME = "native"

BLOCKED = 0
OK = 1
INVALID = 2

RAY_CLEAR = 0
RAY_HIT = 1
RAY_OOB = 2

cdef uint64_t PCG_MULT = 6364136223846793005UL

cdef int DIR_X[4]
cdef int DIR_Y[4]
DIR_X[0] = 0; DIR_X[1] = 1; DIR_X[2] = 0; DIR_X[3] = -1
DIR_Y[0] = -1; DIR_Y[1] = 0; DIR_Y[2] = 1; DIR_Y[3] = 0


cdef uint64_t seed_mix(uint64_t root, uint64_t index) noexcept nogil:
    cdef uint64_t z = root + (index + 1) * 0x9E3779B97F4A7C15UL
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9UL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBUL
    return z ^ (z >> 31)


cdef class Rng:
    """PCG32 with the documented seeding; see the Python twin's docstring."""

    cdef uint64_t _state
    cdef uint64_t _inc

    def __init__(self, seed=0):
        cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
        cdef uint64_t initstate = seed_mix(s, 0)
        cdef uint64_t initseq = seed_mix(s, 1)
        self._state = 0
        self._inc = (initseq << 1) | 1
        self._next32()
        self._state = self._state + initstate
        self._next32()

    cdef inline uint32_t _next32(self) noexcept nogil:
        cdef uint64_t old = self._state
        self._state = old * PCG_MULT + self._inc
        cdef uint32_t xorshifted = <uint32_t>(((old >> 18) ^ old) >> 27)
        cdef uint32_t rot = <uint32_t>(old >> 59)
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31))

    cdef inline uint32_t _bounded(self, uint32_t n) noexcept nogil:
        # Unbiased rejection; matches the Python twin word for word.
        cdef uint64_t limit = (<uint64_t>1 << 32) - ((<uint64_t>1 << 32) % n)
        cdef uint32_t r = self._next32()
        while r >= limit:
            r = self._next32()
        return r % n

    def next_uint32(self):
        return self._next32()

    def randrange(self, n):
        cdef long long nn = n
        if nn <= 0:
            raise ValueError("randrange() bound must be positive")
        if nn >= (<long long>1 << 32):
            raise ValueError("randrange() bound must fit in 32 bits")
        if nn == 1:
            return 0
        return self._bounded(<uint32_t>nn)

    def random(self):
        return self._next32() * (2.0 ** -32)

    def shuffle(self, xs):
        cdef Py_ssize_t i
        cdef uint32_t j
        for i in range(len(xs) - 1, 0, -1):
            j = self._bounded(<uint32_t>(i + 1))
            xs[i], xs[j] = xs[j], xs[i]

    def getstate(self):
        return (self._state, self._inc)

    def setstate(self, state):
        self._state = <uint64_t>(int(state[0]) & 0xFFFFFFFFFFFFFFFF)
        self._inc = <uint64_t>(int(state[1]) & 0xFFFFFFFFFFFFFFFF)


cdef class WorldCore:
    """Flat-array twin of the Python WorldCore; see its docstring."""

    cdef readonly int width
    cdef readonly int height
    cdef readonly int num_layers
    cdef int n_states
    cdef int n_tags
    cdef int32_t* _sl          # state -> layer
    cdef int32_t* _sc          # state -> contact tag id
    cdef int32_t* _occ         # [layer][y][x]
    cdef int32_t* _px
    cdef int32_t* _py
    cdef int32_t* _pl
    cdef int32_t* _po
    cdef int32_t* _ps
    cdef Py_ssize_t _n
    cdef Py_ssize_t _cap
    cdef uint8_t* _present     # [state][tag][2] handler presence
    cdef dict _contacts
    cdef object _dispatch

    def __cinit__(self, width, height, num_layers, state_layers, state_contacts):
        self.width = width
        self.height = height
        self.num_layers = num_layers
        self.n_states = len(state_layers)
        cdef Py_ssize_t i
        cdef int cells = self.width * self.height
        self._sl = <int32_t*>malloc(max(1, self.n_states) * sizeof(int32_t))
        self._sc = <int32_t*>malloc(max(1, self.n_states) * sizeof(int32_t))
        self.n_tags = 1
        for i in range(self.n_states):
            self._sl[i] = state_layers[i]
            self._sc[i] = state_contacts[i]
            if state_contacts[i] + 1 > self.n_tags:
                self.n_tags = state_contacts[i] + 1
        self._occ = <int32_t*>malloc(num_layers * cells * sizeof(int32_t))
        for i in range(num_layers * cells):
            self._occ[i] = -1
        self._cap = 64
        self._n = 0
        self._px = <int32_t*>malloc(self._cap * sizeof(int32_t))
        self._py = <int32_t*>malloc(self._cap * sizeof(int32_t))
        self._pl = <int32_t*>malloc(self._cap * sizeof(int32_t))
        self._po = <int32_t*>malloc(self._cap * sizeof(int32_t))
        self._ps = <int32_t*>malloc(self._cap * sizeof(int32_t))
        self._present = <uint8_t*>malloc(max(1, self.n_states * self.n_tags * 2))
        memset(self._present, 0, max(1, self.n_states * self.n_tags * 2))
        self._contacts = {}
        self._dispatch = None

    def __dealloc__(self):
        free(self._sl); free(self._sc); free(self._occ)
        free(self._px); free(self._py); free(self._pl)
        free(self._po); free(self._ps); free(self._present)

    # -- configuration hooks ------------------------------------------------

    def set_dispatcher(self, fn):
        self._dispatch = fn

    def set_handler_presence(self, state, tag, entering):
        self._present[(state * self.n_tags + tag) * 2 + (1 if entering else 0)] = 1

    # -- accessors ----------------------------------------------------------

    def piece_count(self):
        return self._n

    def piece_x(self, pid):
        return self._px[<Py_ssize_t>pid]

    def piece_y(self, pid):
        return self._py[<Py_ssize_t>pid]

    def piece_layer(self, pid):
        return self._pl[<Py_ssize_t>pid]

    def piece_orientation(self, pid):
        return self._po[<Py_ssize_t>pid]

    def piece_state(self, pid):
        return self._ps[<Py_ssize_t>pid]

    def piece_tuple(self, pid):
        cdef Py_ssize_t i = pid
        return (self._px[i], self._py[i], self._pl[i], self._po[i], self._ps[i])

    def occupant(self, layer, x, y):
        cdef int xx = x, yy = y
        if 0 <= xx < self.width and 0 <= yy < self.height:
            return self._occ[(<int>layer) * self.width * self.height
                             + yy * self.width + xx]
        return -1

    def contact_items(self):
        return sorted((a, b, ta, tb)
                      for (a, b), (ta, tb) in self._contacts.items())

    # -- contact plumbing ---------------------------------------------------

    cdef inline void _maybe_dispatch(self, int receiver, int other, int tag,
                                     bint entering):
        if tag and self._dispatch is not None and \
                self._present[(self._ps[receiver] * self.n_tags + tag) * 2 + entering]:
            self._dispatch(receiver, other, tag, True if entering else False)

    cdef void _begin_contact(self, int a, int b):
        cdef int lo = a if a < b else b
        cdef int hi = b if a < b else a
        key = (lo, hi)
        if key in self._contacts:
            return
        cdef int ta = self._sc[self._ps[lo]]
        cdef int tb = self._sc[self._ps[hi]]
        self._contacts[key] = (ta, tb)
        self._maybe_dispatch(lo, hi, tb, True)
        self._maybe_dispatch(hi, lo, ta, True)

    cdef void _end_contact(self, int a, int b):
        cdef int lo = a if a < b else b
        cdef int hi = b if a < b else a
        tags = self._contacts.pop((lo, hi), None)
        if tags is None:
            return
        self._maybe_dispatch(lo, hi, <int>tags[1], False)
        self._maybe_dispatch(hi, lo, <int>tags[0], False)

    cdef int _gather_partners(self, int pid, int x, int y, int32_t* out) noexcept:
        cdef int cell = y * self.width + x
        cdef int stride = self.width * self.height
        cdef int me = self._pl[pid]
        cdef int n = 0
        cdef int layer
        cdef int32_t q
        for layer in range(self.num_layers):
            if layer == me:
                continue
            q = self._occ[layer * stride + cell]
            if q >= 0 and q != pid:
                out[n] = q
                n += 1
        return n

    cdef void _enter_flow(self, int pid):
        cdef int x0 = self._px[pid]
        cdef int y0 = self._py[pid]
        cdef int cell = y0 * self.width + x0
        cdef int stride = self.width * self.height
        cdef int layer
        cdef int32_t q
        for layer in range(self.num_layers):
            if self._px[pid] != x0 or self._py[pid] != y0:
                break
            if layer == self._pl[pid]:
                continue
            q = self._occ[layer * stride + cell]
            if q >= 0 and q != pid:
                self._begin_contact(pid, q)

    # -- piece lifecycle ----------------------------------------------------

    cdef void _grow(self):
        self._cap *= 2
        self._px = <int32_t*>realloc(self._px, self._cap * sizeof(int32_t))
        self._py = <int32_t*>realloc(self._py, self._cap * sizeof(int32_t))
        self._pl = <int32_t*>realloc(self._pl, self._cap * sizeof(int32_t))
        self._po = <int32_t*>realloc(self._po, self._cap * sizeof(int32_t))
        self._ps = <int32_t*>realloc(self._ps, self._cap * sizeof(int32_t))

    def add_piece(self, state, x, y, orient):
        cdef int s = state, xx = x, yy = y, o = orient
        cdef int layer = self._sl[s]
        cdef int stride = self.width * self.height
        if xx >= 0:
            if self._occ[layer * stride + yy * self.width + xx] >= 0:
                return -1
        if self._n == self._cap:
            self._grow()
        cdef int pid = <int>self._n
        self._n += 1
        self._px[pid] = xx if xx >= 0 else -1
        self._py[pid] = yy if xx >= 0 else -1
        self._pl[pid] = layer
        self._po[pid] = o & 3
        self._ps[pid] = s
        if xx >= 0:
            self._occ[layer * stride + yy * self.width + xx] = pid
            self._enter_flow(pid)
        return pid

    def remove(self, pid):
        cdef int p = pid
        if p < 0 or p >= self._n:
            return INVALID
        cdef int x = self._px[p]
        if x < 0:
            return OK
        cdef int y = self._py[p]
        cdef int32_t partners[64]
        cdef int n = self._gather_partners(p, x, y, partners)
        cdef int stride = self.width * self.height
        self._occ[self._pl[p] * stride + y * self.width + x] = -1
        self._px[p] = -1
        self._py[p] = -1
        cdef int i
        for i in range(n):
            self._end_contact(p, partners[i])
        return OK

    def place(self, pid, x, y):
        cdef int p = pid
        if p < 0 or p >= self._n:
            return INVALID
        cdef int xx = x, yy = y
        cdef int layer = self._pl[p]
        cdef int stride = self.width * self.height
        if self._occ[layer * stride + yy * self.width + xx] >= 0:
            return BLOCKED
        self._px[p] = xx
        self._py[p] = yy
        self._occ[layer * stride + yy * self.width + xx] = p
        self._enter_flow(p)
        return OK

    # -- movement and state -------------------------------------------------

    cdef int _move_to(self, int pid, int tx, int ty):
        if tx < 0 or tx >= self.width or ty < 0 or ty >= self.height:
            return BLOCKED
        cdef int x = self._px[pid]
        cdef int y = self._py[pid]
        if tx == x and ty == y:
            return OK
        cdef int layer = self._pl[pid]
        cdef int stride = self.width * self.height
        if self._occ[layer * stride + ty * self.width + tx] >= 0:
            return BLOCKED
        cdef int32_t partners[64]
        cdef int n = self._gather_partners(pid, x, y, partners)
        self._occ[layer * stride + y * self.width + x] = -1
        self._occ[layer * stride + ty * self.width + tx] = pid
        self._px[pid] = tx
        self._py[pid] = ty
        cdef int i
        for i in range(n):
            self._end_contact(pid, partners[i])
        self._enter_flow(pid)
        return OK

    def move_rel(self, pid, mode):
        cdef int p = pid, m = mode
        if p < 0 or p >= self._n:
            return INVALID
        cdef int x = self._px[p]
        if x < 0:
            return INVALID
        cdef int o = self._po[p]
        cdef int d
        if m == 0:
            d = o
        elif m == 1:
            d = (o + 2) & 3
        elif m == 2:
            d = (o + 3) & 3
        else:
            d = (o + 1) & 3
        return self._move_to(p, x + DIR_X[d], self._py[p] + DIR_Y[d])

    def move_abs(self, pid, dx, dy):
        cdef int p = pid
        if p < 0 or p >= self._n:
            return INVALID
        cdef int x = self._px[p]
        if x < 0:
            return INVALID
        return self._move_to(p, x + <int>dx, self._py[p] + <int>dy)

    def turn(self, pid, mode):
        cdef int p = pid, m = mode
        if p < 0 or p >= self._n:
            return INVALID
        if m == 0:
            self._po[p] = (self._po[p] + 3) & 3
        elif m == 1:
            self._po[p] = (self._po[p] + 1) & 3
        else:
            self._po[p] = (self._po[p] + 2) & 3
        return OK

    def set_orientation(self, pid, orient):
        cdef int p = pid
        if p < 0 or p >= self._n:
            return INVALID
        self._po[p] = (<int>orient) & 3
        return OK

    def set_state(self, pid, new_state):
        cdef int p = pid, ns = new_state
        if p < 0 or p >= self._n:
            return INVALID
        cdef int old = self._ps[p]
        if ns == old:
            return OK
        cdef int x = self._px[p]
        if x < 0:
            self._ps[p] = ns
            self._pl[p] = self._sl[ns]
            return OK
        cdef int old_layer = self._sl[old]
        cdef int new_layer = self._sl[ns]
        cdef int stride = self.width * self.height
        cdef int cell = self._py[p] * self.width + x
        if old_layer != new_layer:
            if self._occ[new_layer * stride + cell] >= 0:
                return BLOCKED
            # Same (x, y): partner set is unchanged, no contact events.
            self._occ[old_layer * stride + cell] = -1
            self._occ[new_layer * stride + cell] = p
            self._pl[p] = new_layer
        self._ps[p] = ns
        return OK

    # -- spatial queries ----------------------------------------------------

    def raycast(self, layer, x0, y0, dx, dy):
        cdef int l = layer
        cdef int x = x0, y = y0
        cdef int ddx = dx, ddy = dy
        cdef int x1 = x + ddx, y1 = y + ddy
        cdef int adx = ddx if ddx >= 0 else -ddx
        cdef int ady = ddy if ddy >= 0 else -ddy
        cdef int sx = 1 if ddx > 0 else (-1 if ddx < 0 else 0)
        cdef int sy = 1 if ddy > 0 else (-1 if ddy < 0 else 0)
        cdef int err = adx - ady
        cdef int e2
        cdef int dist = 0
        cdef int stride = self.width * self.height
        cdef int32_t* occ = self._occ + l * stride
        cdef int32_t pid
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

    def query_disc(self, layer, cx, cy, radius):
        cdef double r2 = (<double>radius) * (<double>radius)
        cdef int r = <int>radius + 1
        cdef int ccx = cx, ccy = cy
        cdef list out = []
        cdef int x_lo = max(ccx - r, 0), x_hi = min(ccx + r, self.width - 1)
        cdef int y_lo = max(ccy - r, 0), y_hi = min(ccy + r, self.height - 1)
        cdef int32_t* occ = self._occ + (<int>layer) * self.width * self.height
        cdef int x, y
        cdef int32_t pid
        for y in range(y_lo, y_hi + 1):
            for x in range(x_lo, x_hi + 1):
                if <double>((x - ccx) * (x - ccx) + (y - ccy) * (y - ccy)) <= r2:
                    pid = occ[y * self.width + x]
                    if pid >= 0:
                        out.append((pid, x, y))
        return out

    def query_diamond(self, layer, cx, cy, radius):
        cdef int r = radius, ccx = cx, ccy = cy
        cdef list out = []
        cdef int x_lo = max(ccx - r, 0), x_hi = min(ccx + r, self.width - 1)
        cdef int y_lo = max(ccy - r, 0), y_hi = min(ccy + r, self.height - 1)
        cdef int32_t* occ = self._occ + (<int>layer) * self.width * self.height
        cdef int x, y, ax, ay
        cdef int32_t pid
        for y in range(y_lo, y_hi + 1):
            ay = y - ccy if y >= ccy else ccy - y
            for x in range(x_lo, x_hi + 1):
                ax = x - ccx if x >= ccx else ccx - x
                if ax + ay <= r:
                    pid = occ[y * self.width + x]
                    if pid >= 0:
                        out.append((pid, x, y))
        return out

    def query_rect(self, layer, cx, cy, dx0, dy0, dx1, dy1):
        cdef int ccx = cx, ccy = cy
        cdef list out = []
        cdef int x_lo = max(ccx + <int>dx0, 0), x_hi = min(ccx + <int>dx1, self.width - 1)
        cdef int y_lo = max(ccy + <int>dy0, 0), y_hi = min(ccy + <int>dy1, self.height - 1)
        cdef int32_t* occ = self._occ + (<int>layer) * self.width * self.height
        cdef int x, y
        cdef int32_t pid
        for y in range(y_lo, y_hi + 1):
            for x in range(x_lo, x_hi + 1):
                pid = occ[y * self.width + x]
                if pid >= 0:
                    out.append((pid, x, y))
        return out

    # -- cloning ------------------------------------------------------------

    def clone(self):
        cdef WorldCore other = WorldCore.__new__(
            WorldCore, self.width, self.height, self.num_layers,
            [self._sl[i] for i in range(self.n_states)],
            [self._sc[i] for i in range(self.n_states)])
        cdef int cells = self.width * self.height
        memcpy(other._occ, self._occ, self.num_layers * cells * sizeof(int32_t))
        while other._cap < self._n:
            other._grow()
        other._n = self._n
        memcpy(other._px, self._px, self._n * sizeof(int32_t))
        memcpy(other._py, self._py, self._n * sizeof(int32_t))
        memcpy(other._pl, self._pl, self._n * sizeof(int32_t))
        memcpy(other._po, self._po, self._n * sizeof(int32_t))
        memcpy(other._ps, self._ps, self._n * sizeof(int32_t))
        memcpy(other._present, self._present, self.n_states * self.n_tags * 2)
        other._contacts = dict(self._contacts)
        other._dispatch = None
        return other


# -- renderers ----------------------------------------------------------------


def render_global(WorldCore core, int32_t[::1] state_sprite,
                  uint8_t[:, :, :, :, :, ::1] rgb, uint8_t[:, :, :, :, ::1] mask,
                  uint8_t[:, :, ::1] opaque, int tile, uint8_t[:, :, ::1] out):
    cdef int stride = core.width * core.height
    cdef int layer, cell, sid, pid, y, x
    memset(&out[0, 0, 0], 0, out.shape[0] * out.shape[1] * 3)
    for layer in range(core.num_layers):
        for cell in range(stride):
            pid = core._occ[layer * stride + cell]
            if pid < 0:
                continue
            sid = state_sprite[core._ps[pid]]
            if sid == -1:
                continue
            if sid == -2:
                return core._ps[pid]
            y = cell // core.width
            x = cell - y * core.width
            _blit(rgb, mask, opaque, sid, core._po[pid], 0, tile,
                  out, y * tile, x * tile)
    return -1


def render_window(WorldCore core, int32_t[::1] state_sprite,
                  uint8_t[:, :, :, :, :, ::1] rgb, uint8_t[:, :, :, :, ::1] mask,
                  uint8_t[:, :, ::1] opaque, int tile, int viewer,
                  int fwd, int back, int left, int right, uint8_t[:, :, ::1] out):
    cdef int d = core._po[viewer]
    cdef int vx = core._px[viewer]
    cdef int vy = core._py[viewer]
    cdef int fx = DIR_X[d], fy = DIR_Y[d]
    cdef int rx = DIR_X[(d + 1) & 3], ry = DIR_Y[(d + 1) & 3]
    cdef int cols = left + right + 1
    cdef int rows = fwd + back + 1
    cdef int stride = core.width * core.height
    cdef int layer, wy, wx, alpha, beta, gx, gy, sid, pid
    memset(&out[0, 0, 0], 0, out.shape[0] * out.shape[1] * 3)
    for layer in range(core.num_layers):
        for wy in range(rows):
            beta = fwd - wy
            for wx in range(cols):
                alpha = wx - left
                gx = vx + alpha * rx + beta * fx
                gy = vy + alpha * ry + beta * fy
                if gx < 0 or gx >= core.width or gy < 0 or gy >= core.height:
                    continue
                pid = core._occ[layer * stride + gy * core.width + gx]
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


cdef inline void _blit(uint8_t[:, :, :, :, :, ::1] rgb,
                       uint8_t[:, :, :, :, ::1] mask,
                       uint8_t[:, :, ::1] opaque,
                       int sid, int orient, int vrot, int tile,
                       uint8_t[:, :, ::1] out, int oy, int ox) noexcept:
    cdef int r, c
    if opaque[sid, orient, vrot]:
        for r in range(tile):
            memcpy(&out[oy + r, ox, 0], &rgb[sid, orient, vrot, r, 0, 0], tile * 3)
    else:
        for r in range(tile):
            for c in range(tile):
                if mask[sid, orient, vrot, r, c]:
                    out[oy + r, ox + c, 0] = rgb[sid, orient, vrot, r, c, 0]
                    out[oy + r, ox + c, 1] = rgb[sid, orient, vrot, r, c, 1]
                    out[oy + r, ox + c, 2] = rgb[sid, orient, vrot, r, c, 2]
