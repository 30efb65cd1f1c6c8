"""Conditional GAN: generator forward pass and adversarial training.

The generator is trained as a noisy-masked-image to clean-image conditional
inpainter: each training example is a masked image pushed to a random noise
level of the forward process. The network has two inference roles, and the
conditioning channel is drawn to cover both: half of the examples condition
on the mask (the final-inpainter role, where holes must be regenerated) and
half condition on a fixed standard-normal image (the loop drift-model role,
where the sampler concatenates its once-drawn noise). Without the second
half the loop input is far outside the training distribution and the
denoising walk destroys the known-region context it is supposed to keep.

Losses are non-saturating with binary cross-entropy on logits; each of the
discriminator and generator losses averages to ln 2 at a zero-logit start.
The generator loss adds an L1 reconstruction term weighted by lambda_l1.
The discriminator always sees the true mask plane alongside real or fake
images.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .imaging import Image
from .masks import MASK_FAMILIES, gen_mask
from .networks import Discriminator, Generator
from .optim import Adam
from .rng import Rng
from .schedule import NoiseSchedule

DEFAULT_GAN_STEPS = 3000


@dataclass(frozen=True)
class GanTrainConfig:
    lr_g: float = 2e-4
    lr_d: float = 2e-4
    lambda_l1: float = 10.0
    batch: int = 16
    steps: int = DEFAULT_GAN_STEPS
    seed: int = 0

    def __post_init__(self):
        for field in ("lr_g", "lr_d", "lambda_l1", "batch", "steps"):
            if getattr(self, field) <= 0:
                raise ValueError(f"GanTrainConfig.{field} must be positive")


def _as_batched(x) -> tuple[np.ndarray, bool]:
    a = x.data if isinstance(x, T.Tensor) else np.asarray(x, dtype=np.float32)
    if a.ndim == 3:
        return a[None], True
    if a.ndim == 4:
        return a, False
    raise ValueError(f"expected (C,H,W) or (N,C,H,W), got shape {a.shape}")


def generator_input(g: Generator, state, conditioning) -> tuple[np.ndarray, bool]:
    """Assemble the 2C-channel generator input, replicating 1-channel
    conditioning (e.g. a mask) across the image's channel count.

    Returns the batched input and whether the call was single-image."""
    s, s_single = _as_batched(state)
    cond, c_single = _as_batched(conditioning)
    if s_single != c_single or s.shape[0] != cond.shape[0]:
        raise ValueError(
            f"generator_forward: batch mismatch {s.shape} vs {cond.shape}")
    if s.shape[2:] != cond.shape[2:]:
        raise ValueError(
            f"generator_forward: spatial mismatch {s.shape[2:]} vs {cond.shape[2:]}")
    if s.shape[1] != g.channels:
        raise ValueError(
            f"generator_forward: state has {s.shape[1]} channels, "
            f"generator expects {g.channels}")
    if cond.shape[1] == 1 and g.channels > 1:
        cond = np.repeat(cond, g.channels, axis=1)
    if cond.shape[1] != g.channels:
        raise ValueError(
            f"generator_forward: conditioning has {cond.shape[1]} channels, "
            f"want 1 or {g.channels}")
    return np.concatenate([s, cond], axis=1), s_single


def generator_forward(g: Generator, state, conditioning) -> T.Tensor:
    """Run the generator on (state, conditioning); output is tanh-bounded.

    Accepts tensors or arrays, single (C,H,W) or batched (N,C,H,W). The
    inputs are treated as constants: gradients flow into the generator's
    parameters only. Single-image calls return a (C,H,W) result detached
    from the graph (they are inference calls); training uses batched form.
    """
    inp, single = generator_input(g, state, conditioning)
    out = g.forward(T.Tensor(inp))
    if single:
        return T.Tensor(out.data[0])
    return out


@dataclass
class GanStepContext:
    """Persistent pieces of the training loop that a single step mutates."""
    opt_g: Adam
    opt_d: Adam
    schedule: NoiseSchedule


def _build_conditional_batch(batch: np.ndarray, rng: Rng,
                             schedule: NoiseSchedule
                             ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Build per-example (state, conditioning) pairs covering both roles.

    Returns (states, mask_planes, cond). Half of the examples train the
    final-inpainter role: the state is the masked image pushed to a uniform
    noise level and the conditioning is the replicated mask. The other half
    train the loop drift-model role: the state is the complete image pushed
    to a low-to-mid noise level (what the bounded loop actually visits,
    where holes already contain generated content rather than zeros) and
    the conditioning is a fixed noise image, as concatenated by the
    sampler. Both halves regress toward the clean image.
    """
    n, c, h, w = batch.shape
    tt = schedule.timesteps
    states = np.empty_like(batch)
    planes = np.empty((n, 1, h, w), dtype=np.float32)
    cond = np.empty((n, c, h, w), dtype=np.float32)
    for i in range(n):
        family = MASK_FAMILIES[int(rng.integers(0, len(MASK_FAMILIES))[0])]
        m = gen_mask(family, rng, h, w).values
        planes[i] = m
        eps = rng.normal(c * h * w).astype(np.float32).reshape(c, h, w)
        if int(rng.integers(0, 2)[0]) == 0:
            t = int(rng.integers(1, tt + 1)[0])
            base = batch[i] * (np.float32(1.0) - m)
            cond[i] = np.repeat(m, c, axis=0) if c > 1 else m
        else:
            t = int(rng.integers(1, tt // 2 + 1)[0])
            base = batch[i]
            cond[i] = rng.normal(c * h * w).astype(np.float32).reshape(c, h, w)
        ab = float(schedule.alpha_bar[t - 1])
        states[i] = (np.float32(np.sqrt(ab)) * base
                     + np.float32(np.sqrt(1.0 - ab)) * eps)
    return states, planes, cond


def gan_train_step(g: Generator, d: Discriminator, batch: np.ndarray, rng: Rng,
                   cfg: GanTrainConfig, ctx: GanStepContext) -> tuple[float, float]:
    """One alternating update: discriminator first, then generator.

    Each optimizer only touches its own network, so the discriminator's
    parameters are bit-identical across the generator step and vice versa.
    """
    if batch.ndim != 4 or batch.shape[0] == 0:
        raise ValueError(f"empty batch (shape {batch.shape})")
    n = batch.shape[0]
    states, planes, cond = _build_conditional_batch(batch, rng, ctx.schedule)

    fake = g.forward(T.Tensor(np.concatenate([states, cond], axis=1)))

    # discriminator step on detached fakes
    real_in = T.Tensor(np.concatenate([batch, planes], axis=1))
    fake_in = T.Tensor(np.concatenate([fake.data, planes], axis=1))
    ones = np.ones((n, 1, 1, 1), dtype=np.float32)
    zeros = np.zeros((n, 1, 1, 1), dtype=np.float32)
    loss_d = T.scale(T.add(T.bce_with_logits(d.forward(real_in), ones),
                           T.bce_with_logits(d.forward(fake_in), zeros)), 0.5)
    d.zero_grads()
    T.backward(loss_d)
    ctx.opt_d.step(d.named_parameters())

    # generator step: adversarial through the updated discriminator, plus L1
    logit_fake = d.forward(T.concat_channels(fake, T.Tensor(planes)))
    adv = T.bce_with_logits(logit_fake, ones)
    l1 = T.mean(T.absolute(T.sub(fake, T.Tensor(batch))))
    loss_g = T.add(adv, T.scale(l1, cfg.lambda_l1))
    g.zero_grads()
    d.zero_grads()
    T.backward(loss_g)
    ctx.opt_g.step(g.named_parameters())
    d.zero_grads()

    return float(loss_g.data), float(loss_d.data)


def train_gan(images: list[Image], cfg: GanTrainConfig, schedule: NoiseSchedule
              ) -> tuple[Generator, Discriminator, list[tuple[float, float]]]:
    """Adversarial training over an image list; returns loss history."""
    if not images:
        raise ValueError("empty training set")
    root = Rng(cfg.seed).split("train_gan")
    c = images[0].channels
    g = Generator(c, root.split("init_g"))
    d = Discriminator(c, root.split("init_d"))
    ctx = GanStepContext(opt_g=Adam(cfg.lr_g), opt_d=Adam(cfg.lr_d),
                         schedule=schedule)
    data = np.stack([im.values for im in images])
    draw = root.split("steps")
    history: list[tuple[float, float]] = []
    for _ in range(cfg.steps):
        idx = draw.integers(0, len(images), cfg.batch)
        history.append(gan_train_step(g, d, data[idx], draw, cfg, ctx))
    return g, d, history


def heldout_l1(g: Generator, images: list[Image], schedule: NoiseSchedule,
               seed: int) -> float:
    """Mean reconstruction L1 on a fixed, seed-determined held-out task set."""
    rng = Rng(seed).split("heldout_l1")
    data = np.stack([im.values for im in images])
    states, _, cond = _build_conditional_batch(data, rng, schedule)
    with T.no_grad():
        out = g.forward(T.Tensor(np.concatenate([states, cond], axis=1)))
    return float(np.mean(np.abs(out.data - data), dtype=np.float64))
