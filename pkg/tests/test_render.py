import numpy as np
import pytest

from gridarena import (
    ConfigError,
    InvalidPiece,
    Orientation,
    RenderError,
    StateDescriptor,
    World,
)
from gridarena.render import Frame, WindowSpec, render_global, render_window
from gridarena.sprites import SpriteSet, parse_sprites, rotate_ccw, rotate_cw

RWS_WINDOW = WindowSpec(3, 1, 2, 2)


def solid(v, tile=2):
    return np.full((tile, tile, 3), v, np.uint8)


def arrow(tile=2):
    # Asymmetric 2x2: distinct corner values pin rotations exactly.
    return np.array([[[10, 0, 0], [20, 0, 0]],
                     [[30, 0, 0], [40, 0, 0]]], np.uint8)


STATES = [
    StateDescriptor("floorish", "low", sprite="pale"),
    StateDescriptor("walker", "up", sprite="arrow"),
    StateDescriptor("blocky", "up", sprite="dark"),
    StateDescriptor("ghost", "up", sprite=""),
]


def make_world(kernel_name, width=6, height=5):
    return World(width, height, ["low", "up"], STATES, seed=0,
                 kernel_name=kernel_name)


def make_sprites(tile=2):
    return SpriteSet.build(tile, {
        "pale": {"rgb": solid(200, tile), "static": True},
        "dark": {"rgb": solid(90, tile), "static": True},
        "arrow": {"rgb": arrow(tile)},
    })


class TestRotationHelpers:
    def test_rotate_cw_hand_checked(self):
        a = np.array([["A", "B"], ["C", "D"]])
        assert rotate_cw(a).tolist() == [["C", "A"], ["D", "B"]]

    def test_rotate_ccw_inverse(self):
        a = np.arange(16).reshape(4, 4)
        assert (rotate_ccw(rotate_cw(a)) == a).all()
        assert rotate_ccw(np.array([["A", "B"], ["C", "D"]])).tolist() == \
            [["B", "D"], ["A", "C"]]


class TestSpriteText:
    def test_parse_golden(self):
        text = """
tile 2
sprite blob static
palette . 1 2 3
palette _ transparent
base
._
..
end
"""
        ss = parse_sprites(text)
        assert ss.tile == 2
        assert "blob" in ss
        i = ss._ids["blob"]
        assert ss.rgb[i, 0, 0].tolist() == [[[1, 2, 3], [0, 0, 0]],
                                            [[1, 2, 3], [1, 2, 3]]]
        assert ss.mask[i, 0, 0].tolist() == [[1, 0], [1, 1]]
        assert ss.opaque[i, 0, 0] == 0

    def test_parse_explicit_orientation(self):
        text = """
tile 2
sprite arrow
palette a 10 0 0
palette b 20 0 0
base
ab
ab
end
orient east
palette a 10 0 0
palette b 20 0 0
base-typo-guard
"""
        with pytest.raises(ConfigError):
            parse_sprites(text)

    def test_missing_palette_char(self):
        with pytest.raises(ConfigError):
            parse_sprites("tile 2\nsprite s\npalette . 0 0 0\nbase\n.x\n..\nend\n")

    def test_wrong_row_length(self):
        with pytest.raises(ConfigError):
            parse_sprites("tile 2\nsprite s\npalette . 0 0 0\nbase\n...\n..\nend\n")

    def test_auto_rotation_matches_helper(self):
        text = """
tile 2
sprite arrow
palette a 10 0 0
palette b 20 0 0
palette c 30 0 0
palette d 40 0 0
base
ab
cd
end
"""
        ss = parse_sprites(text)
        i = ss._ids["arrow"]
        base = ss.rgb[i, 0, 0]
        assert (ss.rgb[i, 1, 0] == rotate_cw(base)).all()
        assert (ss.rgb[i, 2, 0] == rotate_cw(rotate_cw(base))).all()
        assert (ss.rgb[i, 3, 0] == rotate_ccw(base)).all()


class TestGlobalRender:
    def test_frame_dimensions_rws_shape(self, kernel_name):
        w = World(24, 16, ["up"], [StateDescriptor("s", "up", sprite="dark")],
                  seed=0, kernel_name=kernel_name)
        ss = SpriteSet.build(16, {"dark": {"rgb": solid(90, 16)}})
        f = render_global(w, ss)
        assert (f.width, f.height) == (384, 256)
        assert f.pixels.shape == (256, 384, 3)

    def test_empty_world_is_black(self, kernel_name):
        w = make_world(kernel_name)
        f = render_global(w, make_sprites())
        assert not f.pixels.any()

    def test_single_piece_paints_one_tile(self, kernel_name):
        w = make_world(kernel_name)
        w.add_piece("blocky", (0, 0, "up"))
        f = render_global(w, make_sprites())
        nonblack = (f.pixels != 0).any(axis=2)
        assert nonblack.sum() == 4  # tile 2 -> 2x2 pixels
        assert nonblack[:2, :2].all()

    def test_later_layer_wins(self, kernel_name):
        w = make_world(kernel_name)
        w.add_piece("floorish", (1, 1, "low"))
        w.add_piece("blocky", (1, 1, "up"))
        f = render_global(w, make_sprites())
        assert (f.pixels[2:4, 2:4] == 90).all()

    def test_transparent_pixels_show_lower_layer(self, kernel_name):
        ss = SpriteSet.build(2, {
            "pale": {"rgb": solid(200)},
            "dark": {"rgb": solid(90)},
            "arrow": {"rgb": arrow(),
                      "mask": np.array([[True, False], [False, True]])},
        })
        w = make_world(kernel_name)
        w.add_piece("floorish", (0, 0, "low"))
        w.add_piece("walker", (0, 0, "up"), Orientation.NORTH)
        f = render_global(w, ss)
        assert f.pixels[0, 0, 0] == 10      # arrow opaque corner
        assert (f.pixels[0, 1] == 200).all()  # transparent -> floor shows
        assert (f.pixels[1, 0] == 200).all()
        assert f.pixels[1, 1, 0] == 40

    def test_invisible_state_renders_nothing(self, kernel_name):
        w = make_world(kernel_name)
        w.add_piece("ghost", (2, 2, "up"))
        assert not render_global(w, make_sprites()).pixels.any()

    def test_missing_sprite_raises_with_name(self, kernel_name):
        w = make_world(kernel_name)
        w.add_piece("blocky", (0, 0, "up"))
        ss = SpriteSet.build(2, {"pale": {"rgb": solid(1)},
                                 "arrow": {"rgb": arrow()}})
        with pytest.raises(RenderError, match="dark"):
            render_global(w, ss)

    def test_purity_and_reuse(self, kernel_name):
        w = make_world(kernel_name)
        w.add_piece("walker", (3, 2, "up"), Orientation.EAST)
        ss = make_sprites()
        h = w.state_hash()
        a = render_global(w, ss).pixels.copy()
        buf = np.empty_like(a)
        b = render_global(w, ss, out=buf)
        assert b.pixels is buf
        assert (a == b.pixels).all()
        assert w.state_hash() == h

    def test_oriented_piece_uses_rotated_bitmap(self, kernel_name):
        w = make_world(kernel_name)
        w.add_piece("walker", (0, 0, "up"), Orientation.EAST)
        f = render_global(w, make_sprites())
        assert (f.pixels[:2, :2, 0] == rotate_cw(arrow())[:, :, 0]).all()


class TestWindowRender:
    def test_rws_window_is_80x80(self, kernel_name):
        w = World(24, 16, ["up"],
                  [StateDescriptor("av", "up", sprite="a")], seed=0,
                  kernel_name=kernel_name)
        ss = SpriteSet.build(16, {"a": {"rgb": solid(50, 16)}})
        pid = w.add_piece("av", (5, 5, "up"))
        f = render_window(w, ss, pid, RWS_WINDOW)
        assert f.pixels.shape == (80, 80, 3)

    def test_viewer_sits_at_left_forward_cell(self, kernel_name):
        w = make_world(kernel_name)
        pid = w.add_piece("walker", (3, 3, "up"), Orientation.NORTH)
        f = render_window(w, make_sprites(), pid, WindowSpec(1, 1, 1, 1))
        # 3x3 window, viewer at cell (1, 1): rows 2..4, cols 2..4 in pixels.
        assert (f.pixels[2:4, 2:4, 0] == arrow()[:, :, 0]).all()

    def test_corner_viewer_sees_background_outside(self, kernel_name):
        w = make_world(kernel_name)
        pid = w.add_piece("walker", (0, 0, "up"), Orientation.NORTH)
        f = render_window(w, make_sprites(), pid, RWS_WINDOW)
        t = 2
        assert not f.pixels[:3 * t].any()       # 3 rows ahead are off-grid
        assert not f.pixels[:, :2 * t].any()    # 2 columns left are off-grid
        assert f.pixels[3 * t:4 * t, 2 * t:3 * t].any()  # the viewer itself

    def test_off_board_viewer_rejected(self, kernel_name):
        w = make_world(kernel_name)
        pid = w.add_piece("walker", None)
        with pytest.raises(InvalidPiece):
            render_window(w, make_sprites(), pid, RWS_WINDOW)

    def rotated_scene_frames(self, kernel_name, d):
        """Scene and its 90deg-rotated copies must render identical windows."""
        size = 7
        pieces = [("walker", 3, 2, Orientation.NORTH),
                  ("blocky", 1, 1, Orientation.NORTH),
                  ("floorish", 3, 1, Orientation.NORTH),
                  ("walker", 5, 4, Orientation.WEST)]
        ss = SpriteSet.build(2, {
            "pale": {"rgb": solid(200)},
            "dark": {"rgb": solid(90)},
            "arrow": {"rgb": arrow()},
        })
        w = World(size, size, ["low", "up"], STATES, seed=0,
                  kernel_name=kernel_name)
        viewer = None
        for state, x, y, o in pieces:
            # rotate position d quarter-turns clockwise within the square
            for _ in range(d):
                x, y = size - 1 - y, x
            pid = w.add_piece(state, (x, y, "low" if state == "floorish" else "up"),
                              Orientation((o + d) & 3))
            if viewer is None and state == "walker":
                viewer = pid
        return render_window(w, ss, viewer, RWS_WINDOW).pixels

    def test_rotation_consistency_all_directions(self, kernel_name):
        base = self.rotated_scene_frames(kernel_name, 0)
        for d in (1, 2, 3):
            assert (self.rotated_scene_frames(kernel_name, d) == base).all(), d

    def test_consecutive_renders_identical(self, kernel_name):
        w = make_world(kernel_name)
        pid = w.add_piece("walker", (2, 2, "up"), Orientation.SOUTH)
        ss = make_sprites()
        a = render_window(w, ss, pid, RWS_WINDOW).pixels.copy()
        b = render_window(w, ss, pid, RWS_WINDOW).pixels
        assert (a == b).all()


def test_frame_wraps_buffer():
    buf = np.zeros((4, 6, 3), np.uint8)
    f = Frame(buf, step=9)
    assert (f.width, f.height, f.step) == (6, 4, 9)
    assert len(f.tobytes()) == 4 * 6 * 3
