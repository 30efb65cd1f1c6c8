"""Shared fixtures.

``trained`` performs the full reference training (default budgets on the
1000-image toyshapes set) exactly once per session; the regression bounds
and the end-to-end acceptance criterion all read from it. Everything else
here is cheap.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import pytest

import diffganpaint as dgp
from diffganpaint import tensor as T

DATA_SEED = 1234
TRAIN_SEED = 2024
HELDOUT_SEED = 777

GRADCHECK_H = 1e-3
GRADCHECK_MAX_REL_ERR = 1e-2


def gradcheck_rel_err(analytic: np.ndarray, numeric: np.ndarray) -> float:
    analytic = analytic.astype(np.float64)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1.0)
    return float((np.abs(analytic - numeric) / denom).max())


def check_grads(f, params):
    """backward() against the central-difference oracle, h=1e-3, float32."""
    for p in params:
        p.zero_grad()
    loss = f()
    T.backward(loss)
    for p in params:
        numeric = T.finite_difference_gradient(f, p, GRADCHECK_H)
        assert gradcheck_rel_err(p.grad, numeric) <= GRADCHECK_MAX_REL_ERR


@dataclass
class TrainedBundle:
    train_images: list = field(default_factory=list)
    test_images: list = field(default_factory=list)
    schedule: object = None
    eps_net: object = None
    ddpm_losses: list = field(default_factory=list)
    generator: object = None
    discriminator: object = None
    gan_history: list = field(default_factory=list)
    l1_before: float = 0.0
    l1_after: float = 0.0
    train_wall_seconds: float = 0.0


@pytest.fixture(scope="session")
def toy_images():
    return dgp.gen_toyshapes(dgp.DatasetSpec(n=16, size=32, seed=99))


@pytest.fixture(scope="session")
def trained() -> TrainedBundle:
    bundle = TrainedBundle()
    bundle.train_images = dgp.gen_toyshapes(
        dgp.DatasetSpec(n=1000, size=32, seed=DATA_SEED))
    bundle.test_images = dgp.gen_toyshapes(
        dgp.DatasetSpec(n=200, size=32, seed=DATA_SEED + 1))
    bundle.schedule = dgp.make_linear_schedule(200)

    start = time.perf_counter()
    bundle.eps_net, bundle.ddpm_losses = dgp.train_ddpm(
        bundle.train_images, bundle.schedule, seed=TRAIN_SEED)

    cfg = dgp.GanTrainConfig(seed=TRAIN_SEED)
    untrained = dgp.Generator(
        3, dgp.Rng(cfg.seed).split("train_gan").split("init_g"))
    bundle.l1_before = dgp.heldout_l1(
        untrained, bundle.test_images, bundle.schedule, seed=HELDOUT_SEED)
    bundle.generator, bundle.discriminator, bundle.gan_history = dgp.train_gan(
        bundle.train_images, cfg, bundle.schedule)
    bundle.train_wall_seconds = time.perf_counter() - start

    bundle.l1_after = dgp.heldout_l1(
        bundle.generator, bundle.test_images, bundle.schedule, seed=HELDOUT_SEED)
    return bundle


@pytest.fixture()
def small_generator():
    """Random-weight generator whose output layer is non-zero (for range tests)."""
    g = dgp.Generator(3, dgp.Rng(5))
    out_w = g.named_parameters()["out.w"]
    out_w.data[...] = dgp.Rng(6).normal(out_w.data.size).astype(
        np.float32).reshape(out_w.data.shape)
    return g
