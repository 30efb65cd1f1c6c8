import numpy as np
import pytest

from diffganpaint import tensor as T
from diffganpaint.gan import generator_forward
from diffganpaint.networks import (Discriminator, EpsilonNet, Generator,
                                   build_model)
from diffganpaint.rng import Rng


def noise(seed, *shape):
    return Rng(seed).normal(int(np.prod(shape))).astype(np.float32).reshape(shape)


class TestShapes:
    def test_epsilon_net_output_matches_image(self):
        net = EpsilonNet(3, Rng(1))
        out = net.forward(T.Tensor(noise(2, 4, 4, 32, 32)))
        assert out.shape == (4, 3, 32, 32)

    def test_epsilon_net_single_channel(self):
        net = EpsilonNet(1, Rng(1))
        assert net.predict_eps(noise(2, 1, 32, 32), 0.5).shape == (1, 32, 32)

    def test_generator_output_matches_state(self):
        g = Generator(3, Rng(1))
        state = noise(3, 3, 32, 32)
        out = generator_forward(g, state, noise(4, 3, 32, 32))
        assert out.data.shape == (3, 32, 32)

    def test_discriminator_scalar_per_sample(self):
        d = Discriminator(3, Rng(1))
        out = d.forward(T.Tensor(noise(5, 6, 4, 32, 32)))
        assert out.shape == (6, 1, 1, 1)


class TestGeneratorForward:
    def test_output_bounded(self, small_generator):
        out = generator_forward(small_generator, noise(7, 3, 32, 32),
                                noise(8, 3, 32, 32))
        assert (out.data >= -1.0).all() and (out.data <= 1.0).all()
        assert out.data.std() > 0  # non-degenerate weights actually fire

    def test_mask_broadcast_matches_explicit_replication(self, small_generator):
        state = noise(9, 3, 32, 32)
        mask1 = (Rng(10).uniform(32 * 32) > 0.5).astype(np.float32).reshape(1, 32, 32)
        mask3 = np.repeat(mask1, 3, axis=0)
        a = generator_forward(small_generator, state, mask1).data
        b = generator_forward(small_generator, state, mask3).data
        assert np.array_equal(a, b)

    def test_spatial_mismatch_rejected(self):
        g = Generator(3, Rng(1))
        with pytest.raises(ValueError, match="spatial mismatch"):
            generator_forward(g, noise(1, 3, 32, 32), noise(2, 1, 16, 16))

    def test_channel_mismatch_rejected(self):
        g = Generator(3, Rng(1))
        with pytest.raises(ValueError, match="channels"):
            generator_forward(g, noise(1, 2, 32, 32), noise(2, 1, 32, 32))

    def test_batched_matches_single(self, small_generator):
        states = noise(11, 2, 3, 32, 32)
        conds = noise(12, 2, 3, 32, 32)
        batched = generator_forward(small_generator, states, conds).data
        for i in range(2):
            single = generator_forward(small_generator, states[i], conds[i]).data
            assert np.allclose(batched[i], single, atol=1e-6)


class TestCountersAndInit:
    def test_eval_count_tracks_samples(self):
        net = EpsilonNet(3, Rng(1))
        net.forward(T.Tensor(noise(1, 5, 4, 32, 32)))
        net.predict_eps(noise(2, 3, 32, 32), 0.1)
        assert net.eval_count == 6

    def test_same_rng_same_init(self):
        a = Generator(3, Rng(55))
        b = Generator(3, Rng(55))
        assert a.parameter_bytes() == b.parameter_bytes()

    def test_different_rng_different_init(self):
        assert Generator(3, Rng(1)).parameter_bytes() != \
            Generator(3, Rng(2)).parameter_bytes()

    def test_final_layers_start_at_zero(self):
        for model in (Generator(3, Rng(1)), EpsilonNet(3, Rng(1)),
                      Discriminator(3, Rng(1))):
            params = model.named_parameters()
            last = [n for n in params if n.endswith(".w")][-1]
            assert not params[last].data.any()

    def test_zero_grads(self):
        # needs a non-zero target: the zero-init output layer makes the
        # plain sum-of-squares loss (and its gradients) exactly zero
        net = EpsilonNet(3, Rng(1))
        pred = net.forward(T.Tensor(noise(3, 1, 4, 32, 32)))
        target = T.Tensor(np.ones((1, 3, 32, 32), np.float32))
        T.backward(T.sum_squares(T.sub(pred, target)))
        assert any(p.grad.any() for p in net.named_parameters().values())
        net.zero_grads()
        assert not any(p.grad.any() for p in net.named_parameters().values())

    def test_build_model_kinds(self):
        assert isinstance(build_model("generator", 3, Rng(1)), Generator)
        assert isinstance(build_model("epsilon_net", 1, Rng(1)), EpsilonNet)
        assert isinstance(build_model("discriminator", 3, Rng(1)), Discriminator)
        with pytest.raises(ValueError, match="unknown model kind"):
            build_model("vae", 3, Rng(1))
