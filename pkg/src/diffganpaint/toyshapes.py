"""Synthetic shapes dataset: gradient backgrounds with flat rectangles/circles.

Desk-scale stand-in for a real photo corpus. Every pixel of sample ``i`` is
a pure function of (spec.seed, i): geometry is rasterized with integer
comparisons and the only float math is linear interpolation, so datasets are
reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import Image
from .rng import Rng


@dataclass(frozen=True)
class DatasetSpec:
    n: int
    size: int
    seed: int
    min_shapes: int = 1
    max_shapes: int = 3
    palette: str = "rgb"  # "rgb" -> C=3, "gray" -> C=1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.size < 8:
            raise ValueError(f"size must be >= 8, got {self.size}")
        if not 1 <= self.min_shapes <= self.max_shapes:
            raise ValueError(
                f"need 1 <= min_shapes <= max_shapes, got "
                f"{self.min_shapes}..{self.max_shapes}")
        if self.palette not in ("rgb", "gray"):
            raise ValueError(f"palette must be 'rgb' or 'gray', got {self.palette!r}")

    @property
    def channels(self) -> int:
        return 3 if self.palette == "rgb" else 1


def _color(rng: Rng, channels: int) -> np.ndarray:
    return (rng.uniform(channels) * 2.0 - 1.0).astype(np.float32)


def gen_toyshape(spec: DatasetSpec, index: int) -> Image:
    """Render sample ``index`` of the dataset described by ``spec``."""
    if not 0 <= index:
        raise ValueError(f"index must be non-negative, got {index}")
    rng = Rng(spec.seed).split("toyshapes").split(index)
    s = spec.size
    c = spec.channels

    # gradient background between two colors along an integer direction
    c0 = _color(rng, c)
    c1 = _color(rng, c)
    ga = int(rng.integers(0, 4)[0])
    gb = int(rng.integers(0, 4)[0])
    if ga == 0 and gb == 0:
        ga = 1
    yy, xx = np.mgrid[0:s, 0:s]
    ramp = (ga * xx + gb * yy).astype(np.float32)
    ramp /= np.float32(ga * (s - 1) + gb * (s - 1))
    grid = c0[:, None, None] + (c1 - c0)[:, None, None] * ramp[None]

    n_shapes = int(rng.integers(spec.min_shapes, spec.max_shapes + 1)[0])
    for _ in range(n_shapes):
        color = _color(rng, c)
        if int(rng.integers(0, 2)[0]) == 0:
            # rectangle, at least 2 pixels per side
            h = int(rng.integers(2, max(3, s // 2 + 1))[0])
            w = int(rng.integers(2, max(3, s // 2 + 1))[0])
            top = int(rng.integers(0, s - h + 1)[0])
            left = int(rng.integers(0, s - w + 1)[0])
            grid[:, top:top + h, left:left + w] = color[:, None, None]
        else:
            # circle, integer radius test (no anti-aliasing)
            r = int(rng.integers(2, max(3, s // 3 + 1))[0])
            cy = int(rng.integers(0, s)[0])
            cx = int(rng.integers(0, s)[0])
            inside = (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
            grid[:, inside] = color[:, None]

    return Image(np.clip(grid, -1.0, 1.0).astype(np.float32))


def gen_toyshapes(spec: DatasetSpec) -> list[Image]:
    """The full dataset, bit-identical for identical specs."""
    return [gen_toyshape(spec, i) for i in range(spec.n)]
