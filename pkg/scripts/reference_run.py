"""Reference training run at the documented default budgets.

Prints the numbers the regression tests freeze: initial/final DDPM loss,
held-out generator L1 before/after, mean-fill win rates per method and
family, and wall times. Run from the repo root:

    python3 scripts/reference_run.py
"""

import sys
import time

import numpy as np

sys.path.insert(0, "src")

import diffganpaint as dgp  # noqa: E402

TRAIN_SEED = 2024
DATA_SEED = 1234


def main():
    train = dgp.gen_toyshapes(dgp.DatasetSpec(n=1000, size=32, seed=DATA_SEED))
    test = dgp.gen_toyshapes(dgp.DatasetSpec(n=200, size=32, seed=DATA_SEED + 1))
    schedule = dgp.make_linear_schedule(200)

    t0 = time.perf_counter()
    net, losses = dgp.train_ddpm(train, schedule, seed=TRAIN_SEED)
    t_ddpm = time.perf_counter() - t0
    init = float(np.mean(losses[:20]))
    final = float(np.mean(losses[-100:]))
    print(f"ddpm: {len(losses)} steps in {t_ddpm/60:.1f} min; "
          f"loss[first20]={init:.4f} loss[last100]={final:.4f} "
          f"ratio={final/init:.3f}")

    cfg = dgp.GanTrainConfig(seed=TRAIN_SEED)
    g0 = dgp.Generator(3, dgp.Rng(cfg.seed).split("train_gan").split("init_g"))
    l1_before = dgp.heldout_l1(g0, test, schedule, seed=777)
    t0 = time.perf_counter()
    g, d, hist = dgp.train_gan(train, cfg, schedule)
    t_gan = time.perf_counter() - t0
    l1_after = dgp.heldout_l1(g, test, schedule, seed=777)
    print(f"gan: {cfg.steps} steps in {t_gan/60:.1f} min; "
          f"heldout L1 {l1_before:.4f} -> {l1_after:.4f} "
          f"ratio={l1_after/l1_before:.3f}")
    print(f"gan loss head {hist[0]} tail {hist[-1]}")

    t0 = time.perf_counter()
    rows = dgp.evaluate_images(test, g, net, schedule, seed=42,
                               families=("box", "half"))
    t_eval = time.perf_counter() - t0
    print(f"eval: {len(rows)} rows in {t_eval/60:.1f} min")

    oracle = {(r.sample_id, r.mask_family): r.masked_mse
              for r in rows if r.method == "mean_fill"}
    for method in ("diffganpaint", "ddpm_baseline"):
        for family in ("box", "half"):
            group = [r for r in rows
                     if r.method == method and r.mask_family == family]
            wins = sum(r.masked_mse < oracle[(r.sample_id, r.mask_family)]
                       for r in group)
            mse = np.mean([r.masked_mse for r in group])
            omse = np.mean([oracle[(r.sample_id, family)] for r in group])
            print(f"{method:>14} {family:>5}: wins {wins}/{len(group)} "
                  f"({100*wins/len(group):.0f}%) mse={mse:.4f} oracle={omse:.4f}")

    print(f"total train time: {(t_ddpm + t_gan)/60:.1f} min")


if __name__ == "__main__":
    main()
