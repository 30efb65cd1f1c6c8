"""DDPM training, ancestral sampling, and the mask-projected inpainting baseline.

The baseline sampler walks the standard reverse chain but, at every level t,
overwrites the known region with a fresh forward-noised copy of the original
image before taking the reverse step, then composites the known pixels back
bit-exactly at the end. It spends exactly one noise-predictor evaluation per
schedule step, which is what the cost comparison against the hybrid sampler
counts.
"""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .imaging import Image, Mask
from .networks import EpsilonNet
from .optim import Adam
from .rng import Rng
from .schedule import NoiseSchedule, q_sample

DEFAULT_DDPM_STEPS = 2000
DEFAULT_DDPM_BATCH = 16
DEFAULT_DDPM_LR = 1e-3
DEFAULT_EMA_DECAY = 0.999


def _timestep_plane(t_frac: np.ndarray, h: int, w: int) -> np.ndarray:
    return np.broadcast_to(
        t_frac.astype(np.float32)[:, None, None, None],
        (len(t_frac), 1, h, w)).astype(np.float32)


def ddpm_train_step(net: EpsilonNet, batch: np.ndarray, rng: Rng,
                    schedule: NoiseSchedule, opt: Adam) -> float:
    """One noise-prediction step on a (N,C,H,W) batch; returns the loss.

    Each example gets its own uniform timestep and noise draw; the loss is
    the mean squared error between injected and predicted noise over every
    element of the batch.
    """
    if batch.ndim != 4 or batch.shape[0] == 0:
        raise ValueError(f"empty batch (shape {batch.shape})")
    n, _, h, w = batch.shape
    tt = schedule.timesteps
    ts = rng.integers(1, tt + 1, n)
    eps = rng.normal(batch.size).astype(np.float32).reshape(batch.shape)
    ab = schedule.alpha_bar[ts - 1].astype(np.float32)
    x_t = (np.sqrt(ab)[:, None, None, None] * batch
           + np.sqrt(1.0 - ab)[:, None, None, None].astype(np.float32) * eps)
    inp = np.concatenate([x_t, _timestep_plane(ts / tt, h, w)], axis=1)

    pred = net.forward(T.Tensor(inp.astype(np.float32)))
    diff = T.sub(pred, T.Tensor(eps))
    loss = T.scale(T.sum_squares(diff), 1.0 / eps.size)

    net.zero_grads()
    T.backward(loss)
    opt.step(net.named_parameters())
    return float(loss.data)


def train_ddpm(images: list[Image], schedule: NoiseSchedule, seed: int,
               steps: int = DEFAULT_DDPM_STEPS, batch: int = DEFAULT_DDPM_BATCH,
               lr: float = DEFAULT_DDPM_LR,
               ema_decay: float = DEFAULT_EMA_DECAY) -> tuple[EpsilonNet, list[float]]:
    """Train a noise predictor on a toyshapes-style image list.

    The returned network carries the exponential moving average of the
    weights (decay ``ema_decay``); the averaged weights sample noticeably
    better than the last iterate at these short budgets. Pass 0 to keep
    the raw final weights.
    """
    if not images:
        raise ValueError("empty training set")
    root = Rng(seed).split("train_ddpm")
    net = EpsilonNet(images[0].channels, root.split("init"))
    opt = Adam(lr)
    data = np.stack([im.values for im in images])
    draw = root.split("steps")
    params = net.named_parameters()
    shadow = {name: p.data.copy() for name, p in params.items()}
    decay = np.float32(ema_decay)
    losses: list[float] = []
    for _ in range(steps):
        idx = draw.integers(0, len(images), batch)
        losses.append(ddpm_train_step(net, data[idx], draw, schedule, opt))
        if ema_decay:
            for name, p in params.items():
                shadow[name] *= decay
                shadow[name] += (np.float32(1.0) - decay) * p.data
    if ema_decay:
        for name, p in params.items():
            p.data[...] = shadow[name]
    return net, losses


def _reverse_step(net: EpsilonNet, x: np.ndarray, t: int,
                  schedule: NoiseSchedule, rng: Rng) -> np.ndarray:
    """One ancestral reverse step from level t to t-1 (variance beta_t).

    The posterior mean is computed through the implied clean-image estimate,
    which is clamped to [-1, 1]; without clamping, prediction error at small
    budgets compounds across the chain.
    """
    tt = schedule.timesteps
    beta = float(schedule.beta[t - 1])
    alpha = float(schedule.alpha[t - 1])
    ab = float(schedule.alpha_bar[t - 1])
    ab_prev = float(schedule.alpha_bar[t - 2]) if t > 1 else 1.0
    eps_hat = net.predict_eps(x, t / tt)
    x0_hat = (x - np.float32(np.sqrt(1.0 - ab)) * eps_hat) / np.float32(np.sqrt(ab))
    np.clip(x0_hat, -1.0, 1.0, out=x0_hat)
    coef0 = np.float32(np.sqrt(ab_prev) * beta / (1.0 - ab))
    coef_t = np.float32(np.sqrt(alpha) * (1.0 - ab_prev) / (1.0 - ab))
    x = coef0 * x0_hat + coef_t * x
    if t > 1:
        z = rng.normal(x.size).astype(np.float32).reshape(x.shape)
        x = x + np.float32(np.sqrt(beta)) * z
    return x.astype(np.float32)


def ancestral_sample(net: EpsilonNet, schedule: NoiseSchedule, rng: Rng,
                     shape: tuple[int, int, int]) -> Image:
    """Unconditional sample via the full reverse chain; exactly T net calls."""
    c, h, w = shape
    x = rng.normal(c * h * w).astype(np.float32).reshape(c, h, w)
    for t in range(schedule.timesteps, 0, -1):
        x = _reverse_step(net, x, t, schedule, rng)
    return Image(np.clip(x, -1.0, 1.0))


def ddpm_inpaint_baseline(net: EpsilonNet, img: Image, mask: Mask,
                          schedule: NoiseSchedule, rng: Rng) -> Image:
    """Inpaint by reverse diffusion with known-region projection at each level."""
    if (img.height, img.width) != (mask.height, mask.width):
        raise ValueError(
            f"ddpm_inpaint_baseline: image {img.height}x{img.width} vs "
            f"mask {mask.height}x{mask.width}")
    m = mask.values
    keep = np.float32(1.0) - m
    x = rng.normal(img.values.size).astype(np.float32).reshape(img.values.shape)
    for t in range(schedule.timesteps, 0, -1):
        eps_known = rng.normal(x.size).astype(np.float32).reshape(x.shape)
        known_t = q_sample(img.values, t, eps_known, schedule)
        x = known_t * keep + x * m
        x = _reverse_step(net, x, t, schedule, rng)
    result = img.values * keep + np.clip(x, -1.0, 1.0) * m
    return Image(result.astype(np.float32))
