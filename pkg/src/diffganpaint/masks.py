"""Hole-mask generators for mask-agnostic evaluation.

Four families: axis-aligned boxes covering 10-50% of the area, random-walk
brush strokes of radius 1-3, exact half-image masks, and per-pixel Bernoulli
speckle. All geometry is integer arithmetic, so identical (rng, dims)
produce identical masks on every platform.
"""

from __future__ import annotations

import numpy as np

from .imaging import Mask
from .rng import Rng

MASK_FAMILIES = ("box", "stroke", "half", "bernoulli")

_HALF_SIDES = ("left", "right", "top", "bottom")


def _check_dims(h: int, w: int) -> None:
    if h < 8 or w < 8:
        raise ValueError(f"mask dims must be at least 8x8, got {h}x{w}")


def gen_mask_box(rng: Rng, h: int, w: int) -> Mask:
    """Random filled rectangle covering between 10% and 50% of the area."""
    _check_dims(h, w)
    area = h * w
    while True:
        bh = int(rng.integers(1, h + 1)[0])
        bw = int(rng.integers(1, w + 1)[0])
        if 0.10 * area <= bh * bw <= 0.50 * area:
            break
    top = int(rng.integers(0, h - bh + 1)[0])
    left = int(rng.integers(0, w - bw + 1)[0])
    grid = np.zeros((1, h, w), dtype=np.float32)
    grid[0, top:top + bh, left:left + bw] = 1.0
    return Mask(grid)


def gen_mask_stroke(rng: Rng, h: int, w: int) -> Mask:
    """Free-form brush stroke: a clamped random walk stamped with a disc.

    The brush radius is drawn from {1, 2, 3} and the walk takes
    3*max(h, w) eight-neighbourhood steps.
    """
    _check_dims(h, w)
    radius = int(rng.integers(1, 4)[0])
    steps = 3 * max(h, w)
    y = int(rng.integers(0, h)[0])
    x = int(rng.integers(0, w)[0])
    moves = rng.integers(0, 8, steps)

    dy, dx = np.mgrid[-radius:radius + 1, -radius:radius + 1]
    disc = np.argwhere(dy * dy + dx * dx <= radius * radius) - radius

    grid = np.zeros((h, w), dtype=np.float32)
    offsets = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))
    for m in moves:
        py = np.clip(y + disc[:, 0], 0, h - 1)
        px = np.clip(x + disc[:, 1], 0, w - 1)
        grid[py, px] = 1.0
        oy, ox = offsets[int(m)]
        y = min(max(y + oy, 0), h - 1)
        x = min(max(x + ox, 0), w - 1)
    return Mask(grid[None])


def gen_mask_half(h: int, w: int, side: str) -> Mask:
    """Deterministic half-image hole on the given side."""
    _check_dims(h, w)
    if side not in _HALF_SIDES:
        raise ValueError(f"side must be one of {_HALF_SIDES}, got {side!r}")
    grid = np.zeros((1, h, w), dtype=np.float32)
    if side == "left":
        grid[:, :, :w // 2] = 1.0
    elif side == "right":
        grid[:, :, w // 2:] = 1.0
    elif side == "top":
        grid[:, :h // 2, :] = 1.0
    else:
        grid[:, h // 2:, :] = 1.0
    return Mask(grid)


def gen_mask_bernoulli(rng: Rng, h: int, w: int, p: float) -> Mask:
    """Independent per-pixel holes with probability ``p``."""
    _check_dims(h, w)
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    u = rng.uniform(h * w).reshape(h, w)
    return Mask((u < p).astype(np.float32)[None])


def gen_mask(family: str, rng: Rng, h: int, w: int) -> Mask:
    """Dispatch by family name; 'half' picks a side from the stream."""
    if family == "box":
        return gen_mask_box(rng, h, w)
    if family == "stroke":
        return gen_mask_stroke(rng, h, w)
    if family == "half":
        side = _HALF_SIDES[int(rng.integers(0, 4)[0])]
        return gen_mask_half(h, w, side)
    if family == "bernoulli":
        return gen_mask_bernoulli(rng, h, w, 0.3)
    raise ValueError(f"unknown mask family {family!r} (want one of {MASK_FAMILIES})")
