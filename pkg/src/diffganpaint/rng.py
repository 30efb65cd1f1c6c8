"""Counter-based deterministic random number generation.

Every random draw in this package flows through :class:`Rng`. A stream is
fully described by a 64-bit seed plus a 64-bit counter, so replaying any
computation from the same (seed, counter) pair reproduces it bit for bit,
and independent streams can be carved off with :meth:`Rng.split` without
coordinating counter ranges.

The word generator is splitmix64 applied to ``seed + (counter+1)*GOLDEN``;
normal variates come from Box-Muller pairs. Integer paths are pure uint64
arithmetic and therefore platform-stable; the normal path uses libm
transcendentals and is bit-stable per platform.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = 0xFFFFFFFFFFFFFFFF

# 2**-53, scales a 53-bit integer into [0, 1)
_INV53 = 1.0 / 9007199254740992.0


def _mix64(v: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer over a uint64 array."""
    v = v.copy()
    v ^= v >> np.uint64(30)
    v *= _MIX1
    v ^= v >> np.uint64(27)
    v *= _MIX2
    v ^= v >> np.uint64(31)
    return v


def _fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & _MASK64
    return h


class Rng:
    """Deterministic counter-based random stream.

    Draw methods advance ``counter`` by the number of 64-bit words consumed,
    so the stream position is an explicit, serializable integer.
    """

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int = 0):
        self.seed = int(seed) & _MASK64
        self.counter = int(counter) & _MASK64

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed:#x}, counter={self.counter})"

    def split(self, label: int | str) -> "Rng":
        """Derive an independent child stream named by ``label``.

        The child depends only on (parent seed, label), never on the parent's
        counter, so split handles are stable regardless of how much the
        parent has been consumed. Identical labels yield identical children.
        """
        if isinstance(label, int):
            tag = _fnv1a64(b"i" + label.to_bytes(16, "little", signed=True))
        else:
            tag = _fnv1a64(b"s" + str(label).encode("utf-8"))
        child_seed = _mix64(np.uint64(self.seed ^ tag).reshape(1))[0]
        return Rng(int(child_seed), 0)

    def _words(self, n: int) -> np.ndarray:
        """Next ``n`` uint64 words; advances the counter by ``n``."""
        idx = np.arange(1, n + 1, dtype=np.uint64) + np.uint64(self.counter)
        self.counter = (self.counter + n) & _MASK64
        return _mix64(idx * _GOLDEN + np.uint64(self.seed))

    def uniform(self, n: int) -> np.ndarray:
        """``n`` float64 uniforms in [0, 1)."""
        return (self._words(n) >> np.uint64(11)).astype(np.float64) * _INV53

    def integers(self, low: int, high: int, n: int = 1) -> np.ndarray:
        """``n`` int64 draws uniform over [low, high).

        Reduction is by modulo; the bias is below 2**-50 for any range this
        package uses and the arithmetic is integer-only, hence portable.
        """
        if high <= low:
            raise ValueError(f"empty integer range [{low}, {high})")
        span = np.uint64(high - low)
        return (self._words(n) % span).astype(np.int64) + low

    def normal(self, n: int) -> np.ndarray:
        """``n`` float64 standard-normal draws via Box-Muller."""
        pairs = (n + 1) // 2
        u = (self._words(2 * pairs) >> np.uint64(11)).astype(np.float64) * _INV53
        u1 = 1.0 - u[:pairs]  # (0, 1], keeps log finite
        u2 = u[pairs:]
        r = np.sqrt(-2.0 * np.log(u1))
        theta = (2.0 * np.pi) * u2
        out = np.empty(2 * pairs, dtype=np.float64)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]
