"""Exception types shared across the engine and environment layers.

Blocked movement/placement/state-change outcomes are ordinary return
values, not exceptions; these classes cover configuration mistakes and
contract violations only. Read-only property writes raise the builtin
PermissionError.
"""


class ConfigError(ValueError):
    """Invalid world, environment, or callback configuration."""


class PlacementBlocked(RuntimeError):
    """A piece was added onto an already occupied cell."""


class InvalidPiece(KeyError):
    """Unknown piece id, or an off-board piece where on-board is required."""


class TickError(RuntimeError):
    """A callback failed (or recursed too deeply) during simulation.

    Carries the offending piece and callback name.
    """

    def __init__(self, piece: int, callback: str, cause: BaseException):
        super().__init__(f"callback {callback!r} failed for piece {piece}: {cause!r}")
        self.piece = piece
        self.callback = callback
        self.cause = cause


class RenderError(RuntimeError):
    """A sprite required for rendering is missing from the sprite set."""


class StateError(RuntimeError):
    """Operation invalid in the current lifecycle state (e.g. step after end)."""


class NotFoundError(KeyError):
    """Unknown property path."""
