"""Versioned binary checkpoints for named-tensor collections.

Layout, all integers little-endian:

    magic   4 bytes  b"DGPT"
    version u32      currently 1
    kind    u8 length + utf-8 bytes ("generator" / "epsilon_net" / ...)
    count   u32      number of tensor entries
    entry   u16 name length + utf-8 name,
            u32 rank, rank * u32 dims,
            prod(dims) * f32 payload
    crc     u32      CRC-32 over every preceding byte

Writes are atomic (temp file + rename) and loads verify magic, version,
CRC, kind, and the expected parameter names/shapes before touching the
model, so a failed load leaves the model untouched.
"""

from __future__ import annotations

import os
import struct
import tempfile
import zlib

import numpy as np

from .networks import ConvNet, build_model
from .rng import Rng

MAGIC = b"DGPT"
VERSION = 1


def _encode_entries(entries: dict[str, np.ndarray]) -> bytes:
    parts = []
    for name, arr in entries.items():
        nb = name.encode("utf-8")
        arr32 = np.ascontiguousarray(arr, dtype="<f4")
        parts.append(struct.pack("<H", len(nb)))
        parts.append(nb)
        parts.append(struct.pack("<I", arr32.ndim))
        parts.append(struct.pack(f"<{arr32.ndim}I", *arr32.shape))
        parts.append(arr32.tobytes())
    return b"".join(parts)


def save_checkpoint(path: str, model: ConvNet,
                    extra: dict[str, np.ndarray] | None = None) -> None:
    """Write model parameters (plus sorted extra tensors) to ``path``."""
    entries = {name: p.data for name, p in model.named_parameters().items()}
    for name in sorted(extra or {}):
        if name in entries:
            raise ValueError(f"duplicate tensor name {name!r} in checkpoint")
        entries[name] = extra[name]
    kind = model.kind.encode("utf-8")
    body = (MAGIC + struct.pack("<I", VERSION)
            + struct.pack("<B", len(kind)) + kind
            + struct.pack("<I", len(entries))
            + _encode_entries(entries))
    payload = body + struct.pack("<I", zlib.crc32(body))

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


class _Reader:
    def __init__(self, data: bytes, path: str):
        self.data = data
        self.path = path
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ValueError(f"{self.path}: truncated checkpoint")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def read_checkpoint(path: str) -> tuple[str, dict[str, np.ndarray]]:
    """Parse and validate a checkpoint file; returns (kind, tensors)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4 + 4 + 1 + 4 + 4:
        raise ValueError(f"{path}: truncated checkpoint")
    body, (stored_crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != stored_crc:
        raise ValueError(f"{path}: CRC mismatch, checkpoint is corrupt")

    r = _Reader(body, path)
    if r.take(4) != MAGIC:
        raise ValueError(f"{path}: bad magic, not a checkpoint file")
    (version,) = r.unpack("<I")
    if version != VERSION:
        raise ValueError(f"{path}: unknown checkpoint version {version}")
    (kind_len,) = r.unpack("<B")
    kind = r.take(kind_len).decode("utf-8")
    (count,) = r.unpack("<I")
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = r.unpack("<H")
        name = r.take(name_len).decode("utf-8")
        if name in tensors:
            raise ValueError(f"{path}: duplicate tensor name {name!r}")
        (rank,) = r.unpack("<I")
        dims = r.unpack(f"<{rank}I")
        n = int(np.prod(dims)) if rank else 1
        payload = r.take(4 * n)
        tensors[name] = np.frombuffer(payload, dtype="<f4").reshape(dims).copy()
    if r.pos != len(body):
        raise ValueError(f"{path}: {len(body) - r.pos} trailing bytes")
    return kind, tensors


def load_checkpoint(path: str, model: ConvNet) -> dict[str, np.ndarray]:
    """Fill ``model``'s parameters from ``path``; returns any extra tensors."""
    kind, tensors = read_checkpoint(path)
    if kind != model.kind:
        raise ValueError(
            f"{path}: checkpoint kind {kind!r} does not match model kind "
            f"{model.kind!r}")
    params = model.named_parameters()
    for name, p in params.items():
        if name not in tensors:
            raise ValueError(f"{path}: missing tensor {name!r}")
        if tensors[name].shape != p.data.shape:
            raise ValueError(
                f"{path}: tensor {name!r} has shape {tensors[name].shape}, "
                f"model expects {p.data.shape}")
    for name, p in params.items():
        p.data[...] = tensors[name]
    return {name: arr for name, arr in tensors.items() if name not in params}


def _infer_channels(kind: str, tensors: dict[str, np.ndarray]) -> int:
    if "enc1.w" not in tensors:
        raise ValueError("checkpoint lacks enc1.w, cannot infer channel count")
    c_in = tensors["enc1.w"].shape[1]
    if kind == "generator":
        return c_in // 2
    return c_in - 1  # epsilon_net / discriminator take image + one plane


def load_model(path: str) -> tuple[ConvNet, dict[str, np.ndarray]]:
    """Reconstruct a network of the checkpoint's kind and load it."""
    kind, tensors = read_checkpoint(path)
    model = build_model(kind, _infer_channels(kind, tensors), Rng(0))
    extras = load_checkpoint(path, model)
    return model, extras
