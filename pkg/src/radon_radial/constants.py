"""Sphere areas and related normalising constants."""

from __future__ import annotations

import math

__all__ = ["sphere_area"]


def sphere_area(k: int) -> float:
    """Surface area ``|S^k| = 2 pi^{(k+1)/2} / Gamma((k+1)/2)``; ``|S^0| = 2``."""
    if k < 0:
        raise ValueError("sphere dimension must be nonnegative")
    half = 0.5 * (k + 1)
    return 2.0 * math.pi ** half / math.gamma(half)
