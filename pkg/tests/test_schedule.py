import numpy as np
import pytest

from diffganpaint.rng import Rng
from diffganpaint.schedule import (make_linear_schedule, q_sample,
                                   schedule_from_beta)
from diffganpaint.toyshapes import DatasetSpec, gen_toyshape


class TestLinearSchedule:
    def test_single_step(self):
        s = make_linear_schedule(1, 0.1, 0.5)
        assert np.allclose(s.beta, [0.1])
        assert np.allclose(s.alpha_bar, [0.9])

    def test_two_steps_hand_product(self):
        s = make_linear_schedule(2, 0.1, 0.2)
        assert np.allclose(s.beta, [0.1, 0.2])
        assert np.allclose(s.alpha_bar, [0.9, 0.72])

    def test_endpoints_inclusive(self):
        s = make_linear_schedule(200, 1e-4, 0.02)
        assert s.beta[0] == pytest.approx(1e-4)
        assert s.beta[-1] == pytest.approx(0.02)

    def test_alpha_bar_strictly_decreasing(self):
        s = make_linear_schedule(200)
        assert (np.diff(s.alpha_bar) < 0).all()
        assert (s.alpha_bar > 0).all() and (s.alpha_bar < 1).all()

    def test_invalid_ranges_rejected(self):
        with pytest.raises(ValueError):
            make_linear_schedule(0)
        with pytest.raises(ValueError):
            make_linear_schedule(10, 0.2, 0.1)
        with pytest.raises(ValueError):
            make_linear_schedule(10, 0.0, 0.1)

    def test_rebuild_from_beta_matches(self):
        s = make_linear_schedule(50)
        r = schedule_from_beta(s.beta)
        assert np.array_equal(r.alpha_bar, s.alpha_bar)


class TestQSample:
    def test_zero_noise_scales_input(self):
        s = make_linear_schedule(10, 0.1, 0.2)
        x0 = np.full((1, 4, 4), 0.5, np.float32)
        out = q_sample(x0, 3, np.zeros_like(x0), s)
        assert np.array_equal(out, np.float32(np.sqrt(s.alpha_bar[2])) * x0)

    def test_t_out_of_range(self):
        s = make_linear_schedule(10)
        x0 = np.zeros((1, 4, 4), np.float32)
        for t in (0, 11):
            with pytest.raises(ValueError, match="out of range"):
                q_sample(x0, t, np.zeros_like(x0), s)

    def test_shape_mismatch(self):
        s = make_linear_schedule(10)
        with pytest.raises(ValueError, match="eps shape"):
            q_sample(np.zeros((1, 4, 4), np.float32), 1,
                     np.zeros((1, 4, 5), np.float32), s)

    def test_variance_with_zero_input(self):
        s = make_linear_schedule(200)
        rng = Rng(3)
        x0 = np.zeros((1, 10, 10), np.float32)
        for t in (1, 100, 200):
            draws = [q_sample(x0, t, rng.normal(100).astype(np.float32).reshape(1, 10, 10), s)
                     for _ in range(100)]  # 10k values pooled
            var = np.var(np.stack(draws), dtype=np.float64)
            target = 1.0 - float(s.alpha_bar[t - 1])
            assert abs(var - target) <= 0.05 * target

    def test_terminal_step_decorrelates_from_input(self):
        s = make_linear_schedule(200)
        img = gen_toyshape(DatasetSpec(n=1, size=32, seed=8), 0)
        rng = Rng(4)
        xs, x0s = [], []
        for _ in range(10):
            eps = rng.normal(img.values.size).astype(np.float32).reshape(img.values.shape)
            xs.append(q_sample(img.values, s.timesteps, eps, s).ravel())
            x0s.append(img.values.ravel())
        corr = np.corrcoef(np.concatenate(xs), np.concatenate(x0s))[0, 1]
        assert abs(corr) < 0.2
