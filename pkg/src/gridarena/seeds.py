"""Deterministic seed derivation.

Child seeds (per episode, per bot, per worker) come from the splitmix64
output function evaluated at ``root + (index + 1) * golden``; this is the
standard stateless form of the splitmix64 stream and is reproduced
identically by both engine backends.
"""

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_seed(root: int, index: int) -> int:
    """Return the ``index``-th child seed of ``root`` (64-bit)."""
    z = (root + (index + 1) * _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64
