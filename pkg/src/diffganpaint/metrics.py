"""Image quality metrics and the trivial mean-fill baseline."""

from __future__ import annotations

import numpy as np

from .imaging import Image, Mask

PSNR_CAP_DB = 99.0


def psnr(a: Image, b: Image) -> float:
    """Peak signal-to-noise ratio in dB on the [0,1] scale, capped at 99."""
    if a.values.shape != b.values.shape:
        raise ValueError(f"psnr: shape mismatch {a.values.shape} vs {b.values.shape}")
    da = (a.values.astype(np.float64) + 1.0) / 2.0
    db_ = (b.values.astype(np.float64) + 1.0) / 2.0
    mse = float(np.mean((da - db_) ** 2))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * float(np.log10(1.0 / mse)), PSNR_CAP_DB)


def masked_mse(a: Image, b: Image, mask: Mask) -> float:
    """Mean squared error over hole pixels only, on the [-1,1] scale."""
    if a.values.shape != b.values.shape:
        raise ValueError(
            f"masked_mse: shape mismatch {a.values.shape} vs {b.values.shape}")
    if (a.height, a.width) != (mask.height, mask.width):
        raise ValueError(
            f"masked_mse: image {a.height}x{a.width} vs mask "
            f"{mask.height}x{mask.width}")
    hole = mask.values[0] == 1.0
    if not hole.any():
        raise ValueError("empty mask region")
    diff = a.values[:, hole].astype(np.float64) - b.values[:, hole].astype(np.float64)
    return float(np.mean(diff ** 2))


def mean_fill(img: Image, mask: Mask) -> Image:
    """Fill holes with the per-channel mean of the known region.

    Sees only known pixels, so it is a fair lower-bound baseline any learned
    inpainter must beat. An all-hole mask falls back to mid-gray fill.
    """
    if (img.height, img.width) != (mask.height, mask.width):
        raise ValueError(
            f"mean_fill: image {img.height}x{img.width} vs mask "
            f"{mask.height}x{mask.width}")
    hole = mask.values[0] == 1.0
    known = ~hole
    out = img.values.copy()
    for c in range(img.channels):
        fill = float(img.values[c, known].mean(dtype=np.float64)) if known.any() else 0.0
        out[c, hole] = np.float32(fill)
    return Image(out)
