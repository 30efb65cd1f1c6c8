"""Command-line interface.

Subcommands: gen-data, train-ddpm, train-gan, inpaint, baseline-inpaint,
eval. Every subcommand accepts --seed and --config; config files are
``key = value`` lines whose keys must belong to the subcommand's schema
(run with --help or see the README for the key lists). Explicit flags
override config-file values, which override the built-in defaults.

Every run with identical inputs and seed writes byte-identical outputs.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .checkpoint import load_checkpoint, load_model, save_checkpoint
from .config import Config, load_config_file
from .ddpm import ddpm_inpaint_baseline, train_ddpm
from .evaluate import METHODS, evaluate_images, summarize, write_report
from .gan import GanTrainConfig, train_gan
from .imaging import Image, apply_mask, load_image, load_mask, montage, save_image
from .masks import MASK_FAMILIES
from .networks import EpsilonNet, Generator
from .paint import SamplerConfig, diffganpaint_inpaint
from .rng import Rng
from .schedule import make_linear_schedule, schedule_from_beta
from .toyshapes import DatasetSpec, gen_toyshape

GEN_DATA_DEFAULTS: Config = {
    "count": 1000, "size": 32, "palette": "rgb", "min_shapes": 1, "max_shapes": 3,
}
TRAIN_DDPM_DEFAULTS: Config = {
    "steps": 2000, "batch": 16, "lr": 1e-3,
    "timesteps": 200, "beta_start": 1e-4, "beta_end": 0.02,
}
TRAIN_GAN_DEFAULTS: Config = {
    "steps": 3000, "batch": 16, "lr_g": 2e-4, "lr_d": 2e-4, "lambda_l1": 10.0,
    "timesteps": 200, "beta_start": 1e-4, "beta_end": 0.02,
}
INPAINT_DEFAULTS: Config = {"timesteps": 100, "mode": "stabilized"}
BASELINE_DEFAULTS: Config = {}
EVAL_DEFAULTS: Config = {
    "timesteps": 100, "families": ",".join(MASK_FAMILIES),
    "methods": ",".join(METHODS), "limit": 0,
}


def _merge(defaults: Config, config_path: str | None, overrides: Config) -> Config:
    cfg = load_config_file(config_path, defaults) if config_path else dict(defaults)
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    return cfg


def _load_images_dir(path: str) -> list[Image]:
    if not os.path.isdir(path):
        raise ValueError(f"{path}: not a directory")
    names = sorted(n for n in os.listdir(path) if n.endswith((".ppm", ".pgm")))
    if not names:
        raise ValueError(f"{path}: no .ppm/.pgm files found")
    return [load_image(os.path.join(path, n)) for n in names]


def _load_generator(path: str) -> Generator:
    model, _ = load_model(path)
    if not isinstance(model, Generator):
        raise ValueError(f"{path}: checkpoint kind {model.kind!r}, expected 'generator'")
    return model


def _load_ddpm(path: str):
    model, extras = load_model(path)
    if not isinstance(model, EpsilonNet):
        raise ValueError(f"{path}: checkpoint kind {model.kind!r}, expected 'epsilon_net'")
    if "schedule.beta" not in extras:
        raise ValueError(f"{path}: missing tensor 'schedule.beta'")
    return model, schedule_from_beta(extras["schedule.beta"])


def _cmd_gen_data(args) -> int:
    cfg = _merge(GEN_DATA_DEFAULTS, args.config, {
        "count": args.count, "size": args.size, "palette": args.palette,
    })
    spec = DatasetSpec(n=int(cfg["count"]), size=int(cfg["size"]), seed=args.seed,
                       min_shapes=int(cfg["min_shapes"]),
                       max_shapes=int(cfg["max_shapes"]), palette=str(cfg["palette"]))
    os.makedirs(args.out, exist_ok=True)
    ext = "ppm" if spec.palette == "rgb" else "pgm"
    for i in range(spec.n):
        save_image(gen_toyshape(spec, i), os.path.join(args.out, f"sample_{i:05d}.{ext}"))
    print(f"wrote {spec.n} {spec.size}x{spec.size} images to {args.out}")
    return 0


def _cmd_train_ddpm(args) -> int:
    cfg = _merge(TRAIN_DDPM_DEFAULTS, args.config, {
        "steps": args.steps, "batch": args.batch, "lr": args.lr,
    })
    images = _load_images_dir(args.data)
    schedule = make_linear_schedule(int(cfg["timesteps"]),
                                    float(cfg["beta_start"]), float(cfg["beta_end"]))
    net, losses = train_ddpm(images, schedule, args.seed,
                             steps=int(cfg["steps"]), batch=int(cfg["batch"]),
                             lr=float(cfg["lr"]))
    save_checkpoint(args.out, net, extra={"schedule.beta": schedule.beta})
    tail = float(np.mean(losses[-100:]))
    print(f"trained {cfg['steps']} steps: loss {losses[0]:.4f} -> {tail:.4f} "
          f"(mean of last 100); saved {args.out}")
    return 0


def _cmd_train_gan(args) -> int:
    cfg = _merge(TRAIN_GAN_DEFAULTS, args.config, {
        "steps": args.steps, "batch": args.batch,
    })
    images = _load_images_dir(args.data)
    schedule = make_linear_schedule(int(cfg["timesteps"]),
                                    float(cfg["beta_start"]), float(cfg["beta_end"]))
    train_cfg = GanTrainConfig(lr_g=float(cfg["lr_g"]), lr_d=float(cfg["lr_d"]),
                               lambda_l1=float(cfg["lambda_l1"]),
                               batch=int(cfg["batch"]), steps=int(cfg["steps"]),
                               seed=args.seed)
    g, _, history = train_gan(images, train_cfg, schedule)
    save_checkpoint(args.out, g)
    g0, d0 = history[0]
    g1, d1 = history[-1]
    print(f"trained {train_cfg.steps} steps: loss_g {g0:.4f} -> {g1:.4f}, "
          f"loss_d {d0:.4f} -> {d1:.4f}; saved {args.out}")
    return 0


def _cmd_inpaint(args) -> int:
    cfg = _merge(INPAINT_DEFAULTS, args.config, {
        "timesteps": args.T, "mode": args.mode,
    })
    img = load_image(args.image)
    mask = load_mask(args.mask)
    g = _load_generator(args.gan)
    sampler_cfg = SamplerConfig(timesteps=int(cfg["timesteps"]),
                                mode=str(cfg["mode"]), seed=args.seed)
    rng = Rng(args.seed).split("inpaint")
    result, trace = diffganpaint_inpaint(img, mask, g, sampler_cfg, rng)
    save_image(result, args.out)
    if args.montage:
        save_image(montage(img, apply_mask(img, mask), result), args.montage)
    print(f"inpainted {args.image} -> {args.out} "
          f"({trace.generator_evals} generator evals, {trace.wall_seconds:.2f}s)")
    return 0


def _cmd_baseline_inpaint(args) -> int:
    _merge(BASELINE_DEFAULTS, args.config, {})
    img = load_image(args.image)
    mask = load_mask(args.mask)
    net, schedule = _load_ddpm(args.ddpm)
    rng = Rng(args.seed).split("baseline_inpaint")
    before = net.eval_count
    result = ddpm_inpaint_baseline(net, img, mask, schedule, rng)
    save_image(result, args.out)
    if args.montage:
        save_image(montage(img, apply_mask(img, mask), result), args.montage)
    print(f"inpainted {args.image} -> {args.out} "
          f"({net.eval_count - before} epsilon-net evals)")
    return 0


def _cmd_eval(args) -> int:
    cfg = _merge(EVAL_DEFAULTS, args.config, {
        "timesteps": args.T, "families": args.families,
        "methods": args.methods, "limit": args.limit,
    })
    images = _load_images_dir(args.data)
    limit = int(cfg["limit"])
    if limit > 0:
        images = images[:limit]
    families = tuple(str(cfg["families"]).split(","))
    methods = tuple(str(cfg["methods"]).split(","))
    generator = _load_generator(args.gan) if "diffganpaint" in methods else None
    if "ddpm_baseline" in methods:
        eps_net, schedule = _load_ddpm(args.ddpm)
    else:
        eps_net, schedule = None, None
    rows = evaluate_images(images, generator, eps_net, schedule, args.seed,
                           paint_timesteps=int(cfg["timesteps"]),
                           families=families, methods=methods)
    write_report(rows, args.out)
    print(summarize(rows))
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffganpaint",
        description="Train, sample, and evaluate the inpainting models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="root RNG seed")
        p.add_argument("--config", default=None, help="key = value config file")

    p = sub.add_parser("gen-data", help="write a synthetic dataset as PPM/PGM files")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--palette", choices=("rgb", "gray"), default=None)
    common(p)
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("train-ddpm", help="train the noise predictor")
    p.add_argument("--data", required=True, help="directory of training images")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    common(p)
    p.set_defaults(func=_cmd_train_ddpm)

    p = sub.add_parser("train-gan", help="train the conditional generator")
    p.add_argument("--data", required=True, help="directory of training images")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--batch", type=int, default=None)
    common(p)
    p.set_defaults(func=_cmd_train_gan)

    p = sub.add_parser("inpaint", help="inpaint one image with the hybrid sampler")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--gan", required=True, help="generator checkpoint")
    p.add_argument("--T", type=int, default=None, help="denoising loop steps")
    p.add_argument("--mode", choices=("verbatim", "stabilized"), default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--montage", default=None,
                   help="write original|masked|result panel here")
    common(p)
    p.set_defaults(func=_cmd_inpaint)

    p = sub.add_parser("baseline-inpaint", help="inpaint with the DDPM baseline")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--ddpm", required=True, help="epsilon-net checkpoint")
    p.add_argument("--out", required=True)
    p.add_argument("--montage", default=None)
    common(p)
    p.set_defaults(func=_cmd_baseline_inpaint)

    p = sub.add_parser("eval", help="sweep mask families x methods, write CSV")
    p.add_argument("--data", required=True, help="directory of test images")
    p.add_argument("--gan", default=None, help="generator checkpoint")
    p.add_argument("--ddpm", default=None, help="epsilon-net checkpoint")
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--families", default=None, help="comma-separated mask families")
    p.add_argument("--methods", default=None, help="comma-separated methods")
    p.add_argument("--limit", type=int, default=None, help="cap sample count (0 = all)")
    p.add_argument("--out", required=True, help="CSV report path")
    common(p)
    p.set_defaults(func=_cmd_eval)

    return parser


def run_cli(argv: list[str]) -> int:
    """Parse and run; returns the process exit code instead of exiting."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own message
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
