"""gridarena: a fast engine for layered, discrete 2D multi-agent grid worlds.

Pieces with states and callbacks move over a layered grid; raycasts and
area queries enumerate them; a tile renderer produces global and
egocentric RGB frames; a multi-player step API drives episodes. Ships
with the two-player ``rws`` reference environment (spatial
rock-paper-scissors), a benchmarking/replay CLI, and a live play
service for mixing human and bot players.

The hot kernels live in a compiled extension with a pure-Python
fallback selected at import; ``gridarena.backend_name()`` reports which
one is active.
"""

from gridarena.backend import backend_name
from gridarena.errors import (
    ConfigError,
    InvalidPiece,
    NotFoundError,
    PlacementBlocked,
    RenderError,
    StateError,
    TickError,
)
from gridarena.geometry import Move, Orientation, Turn
from gridarena.scheduler import EngineEvent, UpdateOrder
from gridarena.spatial import Diamond, Disc, Rectangle, query_area, raycast
from gridarena.world import MoveResult, PieceView, StateDescriptor, World

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "InvalidPiece", "NotFoundError", "PlacementBlocked",
    "RenderError", "StateError", "TickError",
    "Move", "Orientation", "Turn",
    "EngineEvent", "UpdateOrder",
    "Diamond", "Disc", "Rectangle", "query_area", "raycast",
    "MoveResult", "PieceView", "StateDescriptor", "World",
    "backend_name", "__version__",
]
