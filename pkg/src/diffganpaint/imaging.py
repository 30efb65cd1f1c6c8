"""Image and mask data model plus bit-exact netpbm file I/O.

Images are (C, H, W) float32 grids in [-1, 1] with C of 1 or 3; masks are
(1, H, W) float32 grids whose values are exactly 0.0 or 1.0, where 1 marks
a hole to be filled. On disk, images are binary PGM (P5) / PPM (P6) with
maxval 255 and masks are PGM files whose bytes are exactly 0 or 255.

Byte v maps to v/127.5 - 1 on load; saving rounds clamp(x,-1,1)*127.5+127.5
to the nearest byte, so a save/load round trip moves no pixel by more than
one quantization step (1/127.5). All writes go through a temp file plus
atomic rename.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Image:
    """Normalized pixel grid, values in [-1, 1], shape (C, H, W)."""

    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.ndim != 3 or v.shape[0] not in (1, 3):
            raise ValueError(f"Image must be (C,H,W) with C in {{1,3}}, got {v.shape}")
        if v.dtype != np.float32:
            raise ValueError(f"Image values must be float32, got {v.dtype}")
        if not np.isfinite(v).all() or v.min() < -1.0 or v.max() > 1.0:
            raise ValueError("Image values must be finite and within [-1, 1]")

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class Mask:
    """Binary hole indicator, shape (1, H, W); 1.0 = hole, 0.0 = known."""

    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.ndim != 3 or v.shape[0] != 1:
            raise ValueError(f"Mask must be (1,H,W), got {v.shape}")
        if v.dtype != np.float32:
            raise ValueError(f"Mask values must be float32, got {v.dtype}")
        if not ((v == 0.0) | (v == 1.0)).all():
            raise ValueError("Mask values must be exactly 0.0 or 1.0")

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]

    def coverage(self) -> float:
        """Fraction of pixels that are holes."""
        return float(self.values.mean(dtype=np.float64))


# ---------------------------------------------------------------------------
# quantization

def bytes_to_float(raw: np.ndarray) -> np.ndarray:
    """uint8 -> float32 in [-1, 1]: v / 127.5 - 1."""
    return (raw.astype(np.float32) / np.float32(127.5)) - np.float32(1.0)


def float_to_bytes(values: np.ndarray) -> np.ndarray:
    """float32 in [-1, 1] -> uint8: round(clamp(x)*127.5 + 127.5)."""
    x = np.clip(values, -1.0, 1.0)
    q = np.rint(x * np.float32(127.5) + np.float32(127.5))
    return np.clip(q, 0, 255).astype(np.uint8)


# ---------------------------------------------------------------------------
# netpbm I/O

def _atomic_write(path: str, payload: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated tokens, skipping '#' comments.

    Returns the tokens and the offset of the byte right after the single
    whitespace character that terminates the last token.
    """
    tokens: list[bytes] = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i] == ord("#"):
            while i < n and data[i] != ord("\n"):
                i += 1
            continue
        start = i
        while i < n and not data[i:i + 1].isspace():
            i += 1
        if start == i:
            raise ValueError("truncated netpbm header")
        tokens.append(data[start:i])
    if i >= n or not data[i:i + 1].isspace():
        raise ValueError("netpbm header not terminated by whitespace")
    return tokens, i + 1


def load_image(path: str) -> Image:
    """Load a binary PGM (P5) or PPM (P6) file with maxval 255."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 2:
        raise ValueError(f"{path}: not a netpbm file (too short)")
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise ValueError(f"{path}: unsupported magic {magic!r} (want P5 or P6)")
    tokens, offset = _read_header_tokens(data[2:], 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise ValueError(f"{path}: malformed header: {exc}") from None
    if width < 1 or height < 1:
        raise ValueError(f"{path}: invalid dimensions {width}x{height}")
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval} (want 255)")
    payload = data[2 + offset:]
    expected = width * height * channels
    if len(payload) != expected:
        raise ValueError(
            f"{path}: truncated payload, expected {expected} bytes, got {len(payload)}")
    raw = np.frombuffer(payload, dtype=np.uint8)
    grid = raw.reshape(height, width, channels).transpose(2, 0, 1)
    return Image(bytes_to_float(grid))


def save_image(img: Image, path: str) -> None:
    """Write a P5/P6 file; atomic, byte-deterministic."""
    raw = float_to_bytes(img.values).transpose(1, 2, 0)
    magic = b"P5" if img.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    _atomic_write(path, header + raw.tobytes())


def save_mask(mask: Mask, path: str) -> None:
    """Write a mask as PGM with bytes 0 (known) / 255 (hole)."""
    raw = (mask.values[0] * np.float32(255.0)).astype(np.uint8)
    header = b"P5\n%d %d\n255\n" % (mask.width, mask.height)
    _atomic_write(path, header + raw.tobytes())


def load_mask(path: str) -> Mask:
    """Load a PGM mask; every byte must be exactly 0 or 255."""
    img = load_image(path)
    if img.channels != 1:
        raise ValueError(f"{path}: mask must be single-channel PGM")
    raw = float_to_bytes(img.values)[0]
    if not np.isin(raw, (0, 255)).all():
        raise ValueError(f"{path}: mask file contains non-binary byte values")
    return Mask((raw == 255).astype(np.float32)[None])


# ---------------------------------------------------------------------------
# compositing helpers

def apply_mask(img: Image, mask: Mask) -> Image:
    """Zero out hole pixels: img * (1 - mask), holes become mid-gray."""
    if (img.height, img.width) != (mask.height, mask.width):
        raise ValueError(
            f"apply_mask: image {img.height}x{img.width} vs "
            f"mask {mask.height}x{mask.width}")
    return Image(img.values * (np.float32(1.0) - mask.values))


def montage(original: Image, masked: Image, result: Image) -> Image:
    """Side-by-side panel: original | masked input | result.

    Panels are separated by 2-pixel white (+1.0) columns.
    """
    for other in (masked, result):
        if other.values.shape != original.values.shape:
            raise ValueError(
                f"montage: shape mismatch {other.values.shape} vs {original.values.shape}")
    c, h, _ = original.values.shape
    sep = np.ones((c, h, 2), dtype=np.float32)
    panels = [original.values, sep, masked.values, sep, result.values]
    return Image(np.concatenate(panels, axis=2))
