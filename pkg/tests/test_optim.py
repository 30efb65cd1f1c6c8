import numpy as np
import pytest

from diffganpaint.optim import Adam, AdamState, adam_step
from diffganpaint.tensor import Tensor


def scalar_param(value=0.0):
    return Tensor(np.array([value], np.float32), requires_grad=True)


class TestAdamStep:
    def test_first_step_magnitude_is_lr(self):
        p = scalar_param(0.0)
        state = AdamState()
        adam_step({"p": p}, {"p": np.array([0.5], np.float32)}, state, lr=1e-3)
        # closed form: lr * g / (sqrt(g^2) + eps) ~= lr on the first step
        assert abs(float(p.data[0])) == pytest.approx(1e-3, rel=1e-4)
        assert float(p.data[0]) < 0  # moves against the gradient
        assert state.t == 1

    def test_zero_grad_leaves_params(self):
        p = scalar_param(1.25)
        state = AdamState()
        adam_step({"p": p}, {"p": np.zeros(1, np.float32)}, state, lr=1e-2)
        assert float(p.data[0]) == 1.25
        assert state.t == 1

    def test_shape_mismatch_rejected(self):
        p = scalar_param()
        with pytest.raises(ValueError, match="shape"):
            adam_step({"p": p}, {"p": np.zeros(2, np.float32)}, AdamState(), lr=1e-3)

    def test_identical_runs_bit_identical(self):
        def run():
            p = Tensor(np.ones(4, np.float32), requires_grad=True)
            opt = Adam(1e-2)
            for k in range(10):
                p.grad[...] = (p.data * np.float32(0.1 * (k + 1)))
                opt.step({"p": p})
            return p.data.tobytes()

        assert run() == run()

    def test_moments_shrink_update_under_constant_grad(self):
        # after many identical gradients the update magnitude approaches lr
        p = scalar_param(0.0)
        opt = Adam(1e-2)
        for _ in range(50):
            p.grad[...] = np.float32(2.0)
            opt.step({"p": p})
        assert float(p.data[0]) == pytest.approx(-50 * 1e-2, rel=0.05)
