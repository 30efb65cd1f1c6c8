"""Forward-process noise schedule and noising operator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import Image

DEFAULT_T = 200
DEFAULT_BETA_START = 1e-4
DEFAULT_BETA_END = 0.02


@dataclass(frozen=True)
class NoiseSchedule:
    """Per-step variances beta[t] and derived products, 1-indexed by t.

    ``beta``, ``alpha`` and ``alpha_bar`` are float32 arrays of length T;
    index t-1 holds the step-t coefficient. alpha_bar is strictly
    decreasing and stays in (0, 1).
    """

    beta: np.ndarray
    alpha: np.ndarray
    alpha_bar: np.ndarray

    @property
    def timesteps(self) -> int:
        return len(self.beta)

    def check_t(self, t: int) -> None:
        if not 1 <= t <= self.timesteps:
            raise ValueError(f"t={t} out of range [1, {self.timesteps}]")


def make_linear_schedule(timesteps: int = DEFAULT_T,
                         beta_start: float = DEFAULT_BETA_START,
                         beta_end: float = DEFAULT_BETA_END) -> NoiseSchedule:
    """Betas linearly spaced from beta_start to beta_end inclusive."""
    if timesteps < 1:
        raise ValueError(f"timesteps must be >= 1, got {timesteps}")
    if not 0.0 < beta_start <= beta_end < 1.0:
        raise ValueError(
            f"need 0 < beta_start <= beta_end < 1, got ({beta_start}, {beta_end})")
    if timesteps == 1:
        beta = np.asarray([beta_start], dtype=np.float32)
    else:
        beta = np.linspace(beta_start, beta_end, timesteps, dtype=np.float32)
    return schedule_from_beta(beta)


def schedule_from_beta(beta: np.ndarray) -> NoiseSchedule:
    """Rebuild a schedule from stored betas (checkpoint round trip)."""
    beta = np.asarray(beta, dtype=np.float32)
    if beta.ndim != 1 or len(beta) < 1:
        raise ValueError(f"beta must be a non-empty 1-D array, got shape {beta.shape}")
    if not ((beta > 0.0) & (beta < 1.0)).all():
        raise ValueError("beta values must lie in (0, 1)")
    alpha = (1.0 - beta).astype(np.float32)
    alpha_bar = np.cumprod(alpha, dtype=np.float64).astype(np.float32)
    return NoiseSchedule(beta=beta, alpha=alpha, alpha_bar=alpha_bar)


def q_sample(x0: Image | np.ndarray, t: int, eps: np.ndarray,
             schedule: NoiseSchedule) -> np.ndarray:
    """Noise a clean image to level t: sqrt(ab_t)*x0 + sqrt(1-ab_t)*eps."""
    schedule.check_t(t)
    x = x0.values if isinstance(x0, Image) else x0
    if eps.shape != x.shape:
        raise ValueError(f"q_sample: eps shape {eps.shape} vs x0 {x.shape}")
    ab = float(schedule.alpha_bar[t - 1])
    return (np.float32(np.sqrt(ab)) * x
            + np.float32(np.sqrt(1.0 - ab)) * eps).astype(np.float32)
