"""Mask-agnostic image inpainting with a GAN-driven denoising loop.

The package is a small, fully deterministic stack: a float32 autodiff
tensor core with a counter-based RNG, image/mask data handling with
bit-exact netpbm I/O, standard DDPM machinery, a conditional GAN, the
hybrid denoise-and-composite sampler, and evaluation/CLI plumbing.
"""

from .checkpoint import load_checkpoint, load_model, read_checkpoint, save_checkpoint
from .ddpm import ancestral_sample, ddpm_inpaint_baseline, ddpm_train_step, train_ddpm
from .evaluate import EvalRow, evaluate_images, write_report
from .gan import GanTrainConfig, gan_train_step, generator_forward, heldout_l1, train_gan
from .imaging import (Image, Mask, apply_mask, load_image, load_mask, montage,
                      save_image, save_mask)
from .masks import (MASK_FAMILIES, gen_mask, gen_mask_bernoulli, gen_mask_box,
                    gen_mask_half, gen_mask_stroke)
from .metrics import masked_mse, mean_fill, psnr
from .networks import Discriminator, EpsilonNet, Generator
from .optim import Adam, AdamState, adam_step
from .paint import (ConstantModel, DivergenceError, SampleTrace, SamplerConfig,
                    StateEchoModel, denoise_diffusion, diffganpaint_inpaint)
from .rng import Rng
from .schedule import NoiseSchedule, make_linear_schedule, q_sample, schedule_from_beta
from .tensor import Tensor, backward, no_grad, randn
from .toyshapes import DatasetSpec, gen_toyshape, gen_toyshapes

__version__ = "0.1.0"

__all__ = [
    "Adam", "AdamState", "ConstantModel", "DatasetSpec", "Discriminator",
    "DivergenceError", "EpsilonNet", "EvalRow", "GanTrainConfig", "Generator",
    "Image", "Mask", "MASK_FAMILIES", "NoiseSchedule", "Rng", "SampleTrace",
    "SamplerConfig", "StateEchoModel", "Tensor",
    "adam_step", "ancestral_sample", "apply_mask", "backward",
    "ddpm_inpaint_baseline", "ddpm_train_step", "denoise_diffusion",
    "diffganpaint_inpaint", "evaluate_images", "gan_train_step", "gen_mask",
    "gen_mask_bernoulli", "gen_mask_box", "gen_mask_half", "gen_mask_stroke",
    "gen_toyshape", "gen_toyshapes", "generator_forward", "heldout_l1",
    "load_checkpoint", "load_image", "load_mask", "load_model",
    "make_linear_schedule", "masked_mse", "mean_fill", "montage", "no_grad",
    "psnr", "q_sample", "randn", "read_checkpoint", "save_checkpoint",
    "save_image", "save_mask", "schedule_from_beta", "train_ddpm", "train_gan",
    "write_report",
]
