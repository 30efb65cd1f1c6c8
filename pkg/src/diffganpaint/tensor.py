"""Minimal float32 tensor library with reverse-mode automatic differentiation.

Only the operations the networks in this package need are provided, and all
of them are broadcast-free: elementwise operands must have identical shapes,
and the one concatenation axis is the channel axis. Convolution is realized
as im2col plus a single GEMM so the heavy lifting stays inside BLAS.

Graph recording is on by default and skipped inside :func:`no_grad`; a
recorded graph lives only as long as its output tensor, so inference calls
leave nothing behind once the caller drops the result.
"""

from __future__ import annotations

import contextlib
from typing import Callable, Iterable

import numpy as np

from .rng import Rng

_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Disable graph recording within the block (inference paths)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


class Tensor:
    """A float32 array plus an optional gradient and autodiff bookkeeping.

    ``grad`` is allocated eagerly (zeros) for tensors created with
    ``requires_grad=True`` so that parameters never reached by a backward
    pass report an all-zero gradient rather than ``None``.
    """

    __slots__ = ("data", "requires_grad", "grad", "_parents", "_backward_fn")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float32)
        self.requires_grad = requires_grad
        self.grad = np.zeros_like(self.data) if requires_grad else None
        self._parents: tuple[Tensor, ...] = ()
        self._backward_fn: Callable[[np.ndarray], None] | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def zero_grad(self) -> None:
        if self.grad is not None:
            self.grad[...] = 0.0

    def detach(self) -> "Tensor":
        """A view of the same data cut off from the graph."""
        return Tensor(self.data, requires_grad=False)


def _result(data: np.ndarray, parents: tuple[Tensor, ...],
            backward_fn: Callable[[np.ndarray], None]) -> Tensor:
    """Wrap an op output, recording the graph edge when grad mode is on."""
    track = _grad_enabled and any(p.requires_grad for p in parents)
    out = Tensor(data)
    if track:
        out.requires_grad = True
        out._parents = parents
        out._backward_fn = backward_fn
    return out


def _accumulate(t: Tensor, g: np.ndarray) -> None:
    if t.grad is None:
        t.grad = g.astype(np.float32, copy=True)
    else:
        t.grad += g


def _check_same_shape(op: str, a: Tensor, b: Tensor) -> None:
    if a.data.shape != b.data.shape:
        raise ValueError(f"{op}: shape mismatch {a.data.shape} vs {b.data.shape}")


# ---------------------------------------------------------------------------
# elementwise and reduction ops

def add(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape("add", a, b)

    def bw(g):
        if a.requires_grad:
            _accumulate(a, g)
        if b.requires_grad:
            _accumulate(b, g)

    return _result(a.data + b.data, (a, b), bw)


def sub(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape("sub", a, b)

    def bw(g):
        if a.requires_grad:
            _accumulate(a, g)
        if b.requires_grad:
            _accumulate(b, -g)

    return _result(a.data - b.data, (a, b), bw)


def mul(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape("mul", a, b)

    def bw(g):
        if a.requires_grad:
            _accumulate(a, g * b.data)
        if b.requires_grad:
            _accumulate(b, g * a.data)

    return _result(a.data * b.data, (a, b), bw)


def scale(a: Tensor, s: float) -> Tensor:
    s = float(s)

    def bw(g):
        if a.requires_grad:
            _accumulate(a, g * np.float32(s))

    return _result(a.data * np.float32(s), (a,), bw)


def tanh(a: Tensor) -> Tensor:
    y = np.tanh(a.data)

    def bw(g):
        if a.requires_grad:
            _accumulate(a, g * (1.0 - y * y))

    return _result(y, (a,), bw)


def sigmoid(a: Tensor) -> Tensor:
    y = _sigmoid_stable(a.data)

    def bw(g):
        if a.requires_grad:
            _accumulate(a, g * (y * (1.0 - y)))

    return _result(y, (a,), bw)


def _sigmoid_stable(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def leaky_relu(a: Tensor, slope: float = 0.2) -> Tensor:
    slope = np.float32(slope)
    y = np.where(a.data >= 0, a.data, a.data * slope)

    def bw(g):
        if a.requires_grad:
            _accumulate(a, g * np.where(a.data >= 0, np.float32(1.0), slope))

    return _result(y, (a,), bw)


def absolute(a: Tensor) -> Tensor:
    def bw(g):
        if a.requires_grad:
            _accumulate(a, g * np.sign(a.data))

    return _result(np.abs(a.data), (a,), bw)


def mean(a: Tensor) -> Tensor:
    n = a.data.size

    def bw(g):
        if a.requires_grad:
            _accumulate(a, np.full_like(a.data, g / n))

    return _result(np.asarray(a.data.mean(), dtype=np.float32), (a,), bw)


def sum_squares(a: Tensor) -> Tensor:
    def bw(g):
        if a.requires_grad:
            _accumulate(a, (2.0 * g) * a.data)

    return _result(np.asarray(np.sum(a.data * a.data), dtype=np.float32), (a,), bw)


def bce_with_logits(logits: Tensor, targets: np.ndarray) -> Tensor:
    """Mean binary cross-entropy over all elements, on raw logits.

    Uses the overflow-safe form max(x,0) - x*t + log1p(exp(-|x|)); the
    gradient is (sigmoid(x) - t) / n.
    """
    t = np.asarray(targets, dtype=np.float32)
    if t.shape != logits.data.shape:
        raise ValueError(
            f"bce_with_logits: target shape {t.shape} vs logits {logits.data.shape}")
    x = logits.data
    loss = np.maximum(x, 0.0) - x * t + np.log1p(np.exp(-np.abs(x)))
    n = x.size

    def bw(g):
        if logits.requires_grad:
            _accumulate(logits, (g / n) * (_sigmoid_stable(x) - t))

    return _result(np.asarray(loss.mean(), dtype=np.float32), (logits,), bw)


def mean_spatial(a: Tensor) -> Tensor:
    """Global average over the two trailing spatial axes, kept as size-1 dims."""
    if a.data.ndim != 4:
        raise ValueError(f"mean_spatial: expected (N,C,H,W), got {a.data.shape}")
    h, w = a.data.shape[2], a.data.shape[3]
    y = a.data.mean(axis=(2, 3), keepdims=True)

    def bw(g):
        if a.requires_grad:
            _accumulate(a, np.broadcast_to(g / (h * w), a.data.shape).astype(np.float32))

    return _result(y.astype(np.float32), (a,), bw)


# ---------------------------------------------------------------------------
# structural ops

def concat_channels(a: Tensor, b: Tensor) -> Tensor:
    """Concatenate along the channel axis of (C,H,W) or (N,C,H,W) tensors."""
    sa, sb = a.data.shape, b.data.shape
    if len(sa) not in (3, 4) or len(sa) != len(sb):
        raise ValueError(f"concat_channels: ranks {len(sa)} vs {len(sb)} unsupported")
    if sa[-2:] != sb[-2:]:
        raise ValueError(f"concat_channels: spatial mismatch {sa[-2:]} vs {sb[-2:]}")
    if len(sa) == 4 and sa[0] != sb[0]:
        raise ValueError(f"concat_channels: batch mismatch {sa[0]} vs {sb[0]}")
    axis = len(sa) - 3
    ca = sa[axis]

    def bw(g):
        ga, gb = np.split(g, [ca], axis=axis)
        if a.requires_grad:
            _accumulate(a, ga)
        if b.requires_grad:
            _accumulate(b, gb)

    return _result(np.concatenate([a.data, b.data], axis=axis), (a, b), bw)


def upsample_nearest(a: Tensor, factor: int) -> Tensor:
    """Nearest-neighbour upsampling of the two trailing spatial axes."""
    f = int(factor)
    if f < 1:
        raise ValueError(f"upsample_nearest: factor must be >= 1, got {factor}")
    if a.data.ndim not in (3, 4):
        raise ValueError(f"upsample_nearest: rank {a.data.ndim} unsupported")
    y = np.repeat(np.repeat(a.data, f, axis=-2), f, axis=-1)

    def bw(g):
        if a.requires_grad:
            lead = g.shape[:-2]
            h, w = a.data.shape[-2], a.data.shape[-1]
            blocks = g.reshape(*lead, h, f, w, f)
            _accumulate(a, blocks.sum(axis=(-3, -1)))

    return _result(y, (a,), bw)


# ---------------------------------------------------------------------------
# convolution

def _im2col(xp: np.ndarray, k: int, stride: int, h_out: int, w_out: int) -> np.ndarray:
    """(N,C,Hp,Wp) -> (C*k*k, N*h_out*w_out) patch matrix."""
    win = np.lib.stride_tricks.sliding_window_view(xp, (k, k), axis=(2, 3))
    win = win[:, :, ::stride, ::stride]  # (N, C, h_out, w_out, k, k)
    cols = win.transpose(1, 4, 5, 0, 2, 3)  # (C, k, k, N, h_out, w_out)
    return np.ascontiguousarray(cols).reshape(-1, xp.shape[0] * h_out * w_out)


def conv2d(x: Tensor, w: Tensor, b: Tensor, stride: int = 1, pad: int = 0) -> Tensor:
    """Batched 2-D cross-correlation.

    ``x`` is (N, C_in, H, W), ``w`` is (C_out, C_in, k, k), ``b`` is (C_out,).
    Output spatial size is floor((H + 2*pad - k) / stride) + 1.
    """
    if x.data.ndim != 4:
        raise ValueError(f"conv2d: x must be 4-D (N,C,H,W), got shape {x.data.shape}")
    if w.data.ndim != 4 or w.data.shape[2] != w.data.shape[3]:
        raise ValueError(f"conv2d: w must be (C_out,C_in,k,k), got {w.data.shape}")
    n, c_in, h, wi = x.data.shape
    c_out, c_in_w, k, _ = w.data.shape
    if c_in != c_in_w:
        raise ValueError(f"conv2d: x channels (C_in={c_in}) do not match w (C_in={c_in_w})")
    if b.data.shape != (c_out,):
        raise ValueError(f"conv2d: b must have shape ({c_out},), got {b.data.shape}")
    if stride < 1:
        raise ValueError(f"conv2d: stride must be >= 1, got {stride}")
    if h + 2 * pad < k or wi + 2 * pad < k:
        raise ValueError(
            f"conv2d: kernel k={k} does not fit padded input {h + 2 * pad}x{wi + 2 * pad}")

    h_out = (h + 2 * pad - k) // stride + 1
    w_out = (wi + 2 * pad - k) // stride + 1
    if pad:
        xp = np.pad(x.data, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    else:
        xp = x.data
    cols = _im2col(xp, k, stride, h_out, w_out)
    w_mat = w.data.reshape(c_out, -1)
    out = w_mat @ cols + b.data[:, None]
    out = out.reshape(c_out, n, h_out, w_out).transpose(1, 0, 2, 3)

    def bw(g):
        g_mat = np.ascontiguousarray(g.transpose(1, 0, 2, 3)).reshape(c_out, -1)
        if b.requires_grad:
            _accumulate(b, g_mat.sum(axis=1))
        if w.requires_grad:
            _accumulate(w, (g_mat @ cols.T).reshape(w.data.shape))
        if x.requires_grad:
            dcols = (w_mat.T @ g_mat).reshape(c_in, k, k, n, h_out, w_out)
            dxp = np.zeros_like(xp)
            for i in range(k):
                for j in range(k):
                    dxp[:, :, i:i + stride * h_out:stride,
                        j:j + stride * w_out:stride] += dcols[:, i, j].transpose(1, 0, 2, 3)
            if pad:
                dxp = dxp[:, :, pad:pad + h, pad:pad + wi]
            _accumulate(x, dxp)

    return _result(np.ascontiguousarray(out), (x, w, b), bw)


# ---------------------------------------------------------------------------
# sampling, backward pass, gradient checking

def randn(rng: Rng, shape: Iterable[int]) -> Tensor:
    """I.i.d. standard-normal tensor; advances ``rng`` deterministically."""
    shape = tuple(int(d) for d in shape)
    if len(shape) == 0 or any(d < 1 for d in shape):
        raise ValueError("empty shape")
    n = int(np.prod(shape))
    return Tensor(rng.normal(n).astype(np.float32).reshape(shape))


def backward(loss: Tensor) -> None:
    """Populate gradients of everything reachable from a scalar loss.

    Gradients accumulate across calls; callers zero parameter gradients
    between optimization steps.
    """
    if loss.data.shape != ():
        raise ValueError(f"backward requires a scalar loss, got shape {loss.data.shape}")

    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))

    _accumulate(loss, np.ones_like(loss.data))
    for node in reversed(topo):
        if node._backward_fn is not None and node.grad is not None:
            node._backward_fn(node.grad)


def finite_difference_gradient(f: Callable[[], Tensor], param: Tensor,
                               h: float = 1e-3) -> np.ndarray:
    """Central-difference gradient of scalar ``f()`` w.r.t. ``param``.

    Independent of the autodiff machinery: it only perturbs ``param.data``
    and re-runs the forward function, so it serves as the oracle that
    :func:`backward` is checked against.
    """
    flat = param.data.reshape(-1)
    grad = np.zeros(flat.size, dtype=np.float64)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        with no_grad():
            fp = float(f().data)
        flat[i] = orig - h
        with no_grad():
            fm = float(f().data)
        flat[i] = orig
        grad[i] = (fp - fm) / (2.0 * h)
    return grad.reshape(param.data.shape)
