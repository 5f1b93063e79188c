"""Raycast and area queries, differential-tested against naive scans."""

import random

import pytest

from gridarena import (
    ConfigError,
    Diamond,
    Disc,
    Rectangle,
    StateDescriptor,
    World,
    query_area,
    raycast,
)

LAYERS = ["a", "b"]
STATES = [StateDescriptor("on_a", "a", sprite="x"),
          StateDescriptor("on_b", "b", sprite="y")]


def make_world(kernel_name, width=24, height=16):
    return World(width, height, LAYERS, STATES, seed=0, kernel_name=kernel_name)


def segment_cells(x0, y0, dx, dy):
    """Every cell of the discretized segment, start first, endpoints included.

    Textbook symmetric-error integer line (the pinned discretization),
    transcribed independently of the engine.
    """
    cells = [(x0, y0)]
    x1, y1 = x0 + dx, y0 + dy
    adx, ady = abs(dx), abs(dy)
    sx = (dx > 0) - (dx < 0)
    sy = (dy > 0) - (dy < 0)
    err = adx - ady
    x, y = x0, y0
    while True:
        e2 = 2 * err
        if e2 >= -ady:
            if x == x1:
                break
            err -= ady
            x += sx
        if e2 <= adx:
            if y == y1:
                break
            err += adx
            y += sy
        cells.append((x, y))
    return cells


def oracle_raycast(occupied, width, height, x0, y0, dx, dy):
    """First-hit scan over the segment cells against a plain occupancy dict."""
    for dist, (x, y) in enumerate(segment_cells(x0, y0, dx, dy)):
        if dist == 0:
            continue
        if not (0 <= x < width and 0 <= y < height):
            return ("out_of_bounds", None, (x, y), dist)
        if (x, y) in occupied:
            return ("hit", occupied[(x, y)], (x, y), dist)
    return ("clear", None, (x0 + dx, y0 + dy), 0)


class TestRaycastExamples:
    def test_clear_on_empty_layer(self, kernel_name):
        w = make_world(kernel_name)
        r = raycast(w, (0, 0, "a"), (10, 0))
        assert r.kind == "clear"

    def test_first_hit_distance(self, kernel_name):
        w = make_world(kernel_name)
        pid = w.add_piece("on_a", (3, 0, "a"))
        r = raycast(w, (0, 0, "a"), (10, 0))
        assert r == ("hit", pid, (3, 0), 3)

    def test_layer_filter(self, kernel_name):
        w = make_world(kernel_name)
        w.add_piece("on_b", (3, 0, "b"))
        assert raycast(w, (0, 0, "a"), (10, 0)).kind == "clear"

    def test_out_of_bounds(self, kernel_name):
        w = make_world(kernel_name)
        r = raycast(w, (1, 1, "a"), (-5, 0))
        assert r.kind == "out_of_bounds"
        assert r.position == (-1, 1)
        assert r.distance == 2

    def test_start_cell_excluded(self, kernel_name):
        w = make_world(kernel_name)
        w.add_piece("on_a", (2, 2, "a"))
        r = raycast(w, (2, 2, "a"), (3, 0))
        assert r.kind == "clear"

    def test_zero_offset_rejected(self, kernel_name):
        w = make_world(kernel_name)
        with pytest.raises(ConfigError):
            raycast(w, (0, 0, "a"), (0, 0))

    def test_diagonal_ray(self, kernel_name):
        w = make_world(kernel_name)
        pid = w.add_piece("on_a", (5, 5, "a"))
        assert raycast(w, (2, 2, "a"), (6, 6)) == ("hit", pid, (5, 5), 3)


class TestQueryExamples:
    def fill_layer(self, w, layer, state):
        grid = {}
        for y in range(w.height):
            for x in range(w.width):
                grid[(x, y)] = w.add_piece(state, (x, y, layer))
        return grid

    def test_diamond_radius_zero_is_point_query(self, kernel_name):
        w = make_world(kernel_name)
        pid = w.add_piece("on_a", (5, 5, "a"))
        assert query_area(w, "a", Diamond(0), (5, 5)) == [(pid, (5, 5))]

    def test_disc_radius_one_has_five_cells(self, kernel_name):
        # Brute-force count of sqrt(dx^2+dy^2) <= 1 around (5,5): the four
        # orthogonal neighbours plus the center.
        w = make_world(kernel_name, 16, 16)
        grid = self.fill_layer(w, "a", "on_a")
        got = query_area(w, "a", Disc(1.0), (5, 5))
        assert len(got) == 5
        assert {pos for _, pos in got} == {(5, 5), (4, 5), (6, 5), (5, 4), (5, 6)}

    def test_diamond_radius_two_has_thirteen_cells(self, kernel_name):
        # |dx|+|dy| <= 2 enumerates to 13 cells.
        assert sum(1 for dx in range(-2, 3) for dy in range(-2, 3)
                   if abs(dx) + abs(dy) <= 2) == 13
        w = make_world(kernel_name, 16, 24)
        self.fill_layer(w, "a", "on_a")
        assert len(query_area(w, "a", Diamond(2), (5, 5))) == 13

    def test_rectangle_bounds_inclusive(self, kernel_name):
        w = make_world(kernel_name, 8, 8)
        self.fill_layer(w, "a", "on_a")
        got = query_area(w, "a", Rectangle(-1, -1, 1, 1), (3, 3))
        assert len(got) == 9

    def test_results_sorted_by_y_then_x(self, kernel_name):
        w = make_world(kernel_name, 8, 8)
        self.fill_layer(w, "a", "on_a")
        got = query_area(w, "a", Disc(2.0), (3, 3))
        assert [pos for _, pos in got] == sorted(
            (pos for _, pos in got), key=lambda p: (p[1], p[0]))

    def test_cells_outside_grid_skipped(self, kernel_name):
        w = make_world(kernel_name, 4, 4)
        self.fill_layer(w, "a", "on_a")
        got = query_area(w, "a", Disc(3.0), (0, 0))
        assert all(0 <= x < 4 and 0 <= y < 4 for _, (x, y) in got)

    def test_unknown_layer(self, kernel_name):
        w = make_world(kernel_name)
        with pytest.raises(ConfigError):
            query_area(w, "nope", Diamond(1), (0, 0))


def random_world(kernel_name, rnd):
    width = rnd.randrange(3, 13)
    height = rnd.randrange(3, 13)
    w = World(width, height, LAYERS, STATES, seed=0, kernel_name=kernel_name)
    occupied = {}
    for y in range(height):
        for x in range(width):
            if rnd.random() < 0.25:
                occupied[(x, y)] = w.add_piece("on_a", (x, y, "a"))
            if rnd.random() < 0.15:
                w.add_piece("on_b", (x, y, "b"))  # decoy layer
    return w, occupied


def check_one_world(kernel_name, seed):
    rnd = random.Random(seed)
    w, occupied = random_world(kernel_name, rnd)
    for _ in range(6):
        x0 = rnd.randrange(w.width)
        y0 = rnd.randrange(w.height)
        dx = rnd.randrange(-14, 15)
        dy = rnd.randrange(-14, 15)
        if dx == 0 and dy == 0:
            dx = 1
        got = raycast(w, (x0, y0, "a"), (dx, dy))
        want = oracle_raycast(occupied, w.width, w.height, x0, y0, dx, dy)
        assert tuple(got) == want, (seed, x0, y0, dx, dy)
    cx = rnd.randrange(w.width)
    cy = rnd.randrange(w.height)
    radius = rnd.random() * 4
    want = sorted(
        (occupied[(x, y)], (x, y))
        for (x, y) in occupied
        if (x - cx) ** 2 + (y - cy) ** 2 <= radius * radius)
    got = sorted(query_area(w, "a", Disc(radius), (cx, cy)))
    assert got == want
    r = rnd.randrange(0, 5)
    want = sorted(
        (occupied[(x, y)], (x, y))
        for (x, y) in occupied if abs(x - cx) + abs(y - cy) <= r)
    assert sorted(query_area(w, "a", Diamond(r), (cx, cy))) == want
    dx0, dx1 = sorted((rnd.randrange(-4, 5), rnd.randrange(-4, 5)))
    dy0, dy1 = sorted((rnd.randrange(-4, 5), rnd.randrange(-4, 5)))
    want = sorted(
        (occupied[(x, y)], (x, y))
        for (x, y) in occupied
        if dx0 <= x - cx <= dx1 and dy0 <= y - cy <= dy1)
    assert sorted(query_area(w, "a", Rectangle(dx0, dy0, dx1, dy1), (cx, cy))) == want


class TestOracleEquivalence:
    def test_random_worlds(self, kernel_name):
        for seed in range(150):
            check_one_world(kernel_name, seed)


class TestProperties:
    def test_query_monotone_in_radius(self, kernel_name):
        rnd = random.Random(4)
        w, _ = random_world(kernel_name, rnd)
        for r in range(0, 6):
            small = set(query_area(w, "a", Diamond(r), (2, 2)))
            big = set(query_area(w, "a", Diamond(r + 1), (2, 2)))
            assert small <= big
        for r in (0.5, 1.5, 2.5):
            small = set(query_area(w, "a", Disc(r), (2, 2)))
            big = set(query_area(w, "a", Disc(r + 1), (2, 2)))
            assert small <= big

    def test_hit_distance_bounded_by_chebyshev(self, kernel_name):
        rnd = random.Random(11)
        for seed in range(40):
            w, occupied = random_world(kernel_name, rnd)
            x0 = rnd.randrange(w.width)
            y0 = rnd.randrange(w.height)
            dx = rnd.randrange(-9, 10)
            dy = rnd.randrange(-9, 10)
            if dx == 0 and dy == 0:
                dy = 3
            r = raycast(w, (x0, y0, "a"), (dx, dy))
            if r.kind == "hit":
                assert r.distance <= max(abs(dx), abs(dy))
                assert r.position in occupied
