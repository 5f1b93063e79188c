"""Cardinal orientations and grid direction math.

Screen-space convention throughout: x grows east (right), y grows south
(down), so NORTH is -y. Orientation codes are fixed as N=0, E=1, S=2,
W=3; a right (clockwise) turn adds 1 mod 4.
"""

from enum import IntEnum


class Orientation(IntEnum):
    NORTH = 0
    EAST = 1
    SOUTH = 2
    WEST = 3


class Move(IntEnum):
    """Relative move kinds; absolute moves are passed as (dx, dy) tuples."""

    FORWARD = 0
    BACKWARD = 1
    STRAFE_LEFT = 2
    STRAFE_RIGHT = 3


class Turn(IntEnum):
    LEFT = 0
    RIGHT = 1
    ABOUT = 2


# (dx, dy) per orientation code, NORTH first.
DIRECTIONS = ((0, -1), (1, 0), (0, 1), (-1, 0))


def forward_vector(orientation: int) -> tuple[int, int]:
    return DIRECTIONS[orientation & 3]


def right_vector(orientation: int) -> tuple[int, int]:
    return DIRECTIONS[(orientation + 1) & 3]


def turned(orientation: int, turn: int) -> "Orientation":
    """Orientation after a LEFT/RIGHT/ABOUT turn."""
    if turn == Turn.LEFT:
        return Orientation((orientation + 3) & 3)
    if turn == Turn.RIGHT:
        return Orientation((orientation + 1) & 3)
    return Orientation((orientation + 2) & 3)
