"""Quick directional diagnostics at reduced budget (not the reference run)."""

import sys
import time

import numpy as np

sys.path.insert(0, "src")

import diffganpaint as dgp  # noqa: E402
from diffganpaint.paint import denoise_diffusion  # noqa: E402


def win_rate(rows, oracle):
    wins = [r.masked_mse < oracle[(r.sample_id, r.mask_family)] for r in rows]
    return sum(wins), len(wins)


def main(ddpm_steps=800, gan_steps=1000, n_train=300, n_test=40):
    train = dgp.gen_toyshapes(dgp.DatasetSpec(n=n_train, size=32, seed=1234))
    test = dgp.gen_toyshapes(dgp.DatasetSpec(n=n_test, size=32, seed=1235))
    schedule = dgp.make_linear_schedule(200)

    t0 = time.perf_counter()
    net, losses = dgp.train_ddpm(train, schedule, seed=2024, steps=ddpm_steps)
    print(f"ddpm {ddpm_steps} steps {time.perf_counter()-t0:.0f}s: "
          f"loss {losses[0]:.3f} -> {np.mean(losses[-50:]):.3f}")

    cfg = dgp.GanTrainConfig(seed=2024, steps=gan_steps)
    t0 = time.perf_counter()
    g, d, hist = dgp.train_gan(train, cfg, schedule)
    print(f"gan {gan_steps} steps {time.perf_counter()-t0:.0f}s: "
          f"g {hist[0][0]:.3f}->{hist[-1][0]:.3f} d {hist[0][1]:.3f}->{hist[-1][1]:.3f}")

    # direct final-call quality without the loop (diagnostic only)
    mask = dgp.gen_mask_half(32, 32, "left")
    direct, loop_final = [], []
    for i, img in enumerate(test):
        masked = dgp.apply_mask(img, mask)
        out = dgp.generator_forward(g, masked.values, mask.values).data
        comp = dgp.Image(out * mask.values + masked.values * (1 - mask.values))
        direct.append(dgp.masked_mse(comp, img, mask))
        oracle = dgp.masked_mse(dgp.mean_fill(img, mask), img, mask)
        res, _ = dgp.diffganpaint_inpaint(img, mask, g,
                                          dgp.SamplerConfig(timesteps=100),
                                          dgp.Rng(5000 + i))
        loop_final.append((dgp.masked_mse(res, img, mask), oracle))
    print(f"direct g inpaint: mse={np.mean(direct):.4f}")
    wins = sum(m < o for m, o in loop_final)
    print(f"diffganpaint loop: mse={np.mean([m for m, _ in loop_final]):.4f} "
          f"oracle={np.mean([o for _, o in loop_final]):.4f} wins {wins}/{len(loop_final)}")

    # how much does the loop state drift from the masked input on known pixels?
    img = test[0]
    masked = dgp.apply_mask(img, mask)
    state, _ = denoise_diffusion(masked, g, dgp.SamplerConfig(timesteps=100),
                                 dgp.Rng(1))
    known = mask.values[0] == 0
    print(f"loop state: known-region rmse "
          f"{np.sqrt(np.mean((state[:, known] - masked.values[:, known])**2)):.3f}, "
          f"state std {state.std():.3f}")

    bwins = 0
    bmse = []
    for i, img in enumerate(test):
        res = dgp.ddpm_inpaint_baseline(net, img, mask, schedule, dgp.Rng(7000 + i))
        m = dgp.masked_mse(res, img, mask)
        o = dgp.masked_mse(dgp.mean_fill(img, mask), img, mask)
        bmse.append(m)
        bwins += m < o
    print(f"ddpm baseline: mse={np.mean(bmse):.4f} wins {bwins}/{len(test)}")


if __name__ == "__main__":
    main()
