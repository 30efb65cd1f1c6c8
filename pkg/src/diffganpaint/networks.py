"""The three small convolutional networks used by this package.

All networks are plain named-parameter collections built from the conv /
activation ops in :mod:`diffganpaint.tensor`. Hidden layers use He-normal
initialization drawn from per-layer RNG streams; every final layer starts
at zero so untrained networks predict zero, which pins the initial losses
the tests assert.

Each network counts how many samples have passed through ``forward``; the
samplers read that counter to report exact model-evaluation costs.
"""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .rng import Rng

LEAKY_SLOPE = 0.2


class Conv:
    """One conv layer: weights, bias, stride and padding."""

    def __init__(self, name: str, c_in: int, c_out: int, k: int,
                 stride: int, pad: int, rng: Rng, zero_init: bool = False):
        self.name = name
        self.stride = stride
        self.pad = pad
        if zero_init:
            w = np.zeros((c_out, c_in, k, k), dtype=np.float32)
        else:
            std = float(np.sqrt(2.0 / (c_in * k * k)))
            draws = rng.split(name).split("w").normal(c_out * c_in * k * k)
            w = (draws * std).astype(np.float32).reshape(c_out, c_in, k, k)
        self.w = T.Tensor(w, requires_grad=True)
        self.b = T.Tensor(np.zeros(c_out, dtype=np.float32), requires_grad=True)

    def __call__(self, x: T.Tensor) -> T.Tensor:
        return T.conv2d(x, self.w, self.b, stride=self.stride, pad=self.pad)


class ConvNet:
    """Base class: parameter registry, eval counter, numpy convenience API."""

    kind = "convnet"

    def __init__(self):
        self._layers: list[Conv] = []
        self.eval_count = 0

    def _register(self, layer: Conv) -> Conv:
        self._layers.append(layer)
        return layer

    def named_parameters(self) -> dict[str, T.Tensor]:
        out: dict[str, T.Tensor] = {}
        for layer in self._layers:
            out[f"{layer.name}.w"] = layer.w
            out[f"{layer.name}.b"] = layer.b
        return out

    def zero_grads(self) -> None:
        for p in self.named_parameters().values():
            p.zero_grad()

    def parameter_bytes(self) -> bytes:
        """Concatenated raw parameter payload, for bit-exact comparisons."""
        return b"".join(p.data.tobytes() for p in self.named_parameters().values())

    def forward(self, x: T.Tensor) -> T.Tensor:
        raise NotImplementedError

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Inference on a (C,H,W) or (N,C,H,W) array, no graph recorded."""
        single = x.ndim == 3
        if single:
            x = x[None]
        with T.no_grad():
            out = self.forward(T.Tensor(x)).data
        return out[0] if single else out


class EpsilonNet(ConvNet):
    """Noise predictor for the DDPM path.

    Input is the noisy image with one extra constant plane carrying the
    normalized timestep t/T; output has the image's channel count and is
    unbounded (it estimates the injected standard-normal noise). Additive
    skip connections bridge each encoder stage to the matching decoder
    stage; noise prediction at low noise levels needs that full-resolution
    path.
    """

    kind = "epsilon_net"

    def __init__(self, channels: int, rng: Rng):
        super().__init__()
        self.channels = channels
        self.enc1 = self._register(Conv("enc1", channels + 1, 16, 3, 1, 1, rng))
        self.enc2 = self._register(Conv("enc2", 16, 32, 3, 2, 1, rng))
        self.enc3 = self._register(Conv("enc3", 32, 64, 3, 2, 1, rng))
        self.dec1 = self._register(Conv("dec1", 64, 32, 3, 1, 1, rng))
        self.dec2 = self._register(Conv("dec2", 32, 16, 3, 1, 1, rng))
        self.out = self._register(Conv("out", 16, channels, 3, 1, 1, rng, zero_init=True))

    def forward(self, x: T.Tensor) -> T.Tensor:
        self.eval_count += x.shape[0]
        h1 = T.leaky_relu(self.enc1(x), LEAKY_SLOPE)
        h2 = T.leaky_relu(self.enc2(h1), LEAKY_SLOPE)
        h3 = T.leaky_relu(self.enc3(h2), LEAKY_SLOPE)
        d1 = T.add(T.leaky_relu(self.dec1(T.upsample_nearest(h3, 2)), LEAKY_SLOPE), h2)
        d2 = T.add(T.leaky_relu(self.dec2(T.upsample_nearest(d1, 2)), LEAKY_SLOPE), h1)
        return self.out(d2)

    def predict_eps(self, x: np.ndarray, t_frac) -> np.ndarray:
        """Predict noise for (C,H,W)/(N,C,H,W) ``x`` at timestep fraction t/T."""
        single = x.ndim == 3
        if single:
            x = x[None]
        frac = np.broadcast_to(np.asarray(t_frac, dtype=np.float32), (x.shape[0],))
        plane = np.broadcast_to(
            frac[:, None, None, None],
            (x.shape[0], 1, x.shape[2], x.shape[3])).astype(np.float32)
        inp = np.concatenate([x, plane], axis=1)
        with T.no_grad():
            out = self.forward(T.Tensor(inp)).data
        return out[0] if single else out


class Generator(ConvNet):
    """Conditional image generator: (state, conditioning) -> image in [-1,1].

    Consumes 2C channels (C state + C conditioning) and emits C channels
    through a tanh, so outputs never leave [-1, 1]. As in the noise
    predictor, additive encoder-to-decoder skips give the decoder a
    full-resolution view of the known region.
    """

    kind = "generator"

    def __init__(self, channels: int, rng: Rng):
        super().__init__()
        self.channels = channels
        self.enc1 = self._register(Conv("enc1", 2 * channels, 32, 3, 1, 1, rng))
        self.enc2 = self._register(Conv("enc2", 32, 64, 3, 2, 1, rng))
        self.enc3 = self._register(Conv("enc3", 64, 64, 3, 2, 1, rng))
        self.dec1 = self._register(Conv("dec1", 64, 32, 3, 1, 1, rng))
        self.out = self._register(Conv("out", 32, channels, 3, 1, 1, rng, zero_init=True))

    def forward(self, x: T.Tensor) -> T.Tensor:
        self.eval_count += x.shape[0]
        h1 = T.leaky_relu(self.enc1(x), LEAKY_SLOPE)
        h2 = T.leaky_relu(self.enc2(h1), LEAKY_SLOPE)
        h3 = T.leaky_relu(self.enc3(h2), LEAKY_SLOPE)
        d1 = T.leaky_relu(self.dec1(T.add(T.upsample_nearest(h3, 2), h2)), LEAKY_SLOPE)
        return T.tanh(self.out(T.add(T.upsample_nearest(d1, 2), h1)))


class Discriminator(ConvNet):
    """Patch encoder -> global mean -> scalar realness logit per sample."""

    kind = "discriminator"

    def __init__(self, channels: int, rng: Rng):
        super().__init__()
        self.channels = channels
        self.enc1 = self._register(Conv("enc1", channels + 1, 32, 3, 2, 1, rng))
        self.enc2 = self._register(Conv("enc2", 32, 64, 3, 2, 1, rng))
        self.head = self._register(Conv("head", 64, 1, 1, 1, 0, rng, zero_init=True))

    def forward(self, x: T.Tensor) -> T.Tensor:
        self.eval_count += x.shape[0]
        h = T.leaky_relu(self.enc1(x), LEAKY_SLOPE)
        h = T.leaky_relu(self.enc2(h), LEAKY_SLOPE)
        return self.head(T.mean_spatial(h))


def build_model(kind: str, channels: int, rng: Rng) -> ConvNet:
    """Construct a network by its checkpoint kind tag."""
    table = {
        EpsilonNet.kind: EpsilonNet,
        Generator.kind: Generator,
        Discriminator.kind: Discriminator,
    }
    if kind not in table:
        raise ValueError(f"unknown model kind {kind!r} (want one of {sorted(table)})")
    return table[kind](channels, rng)
