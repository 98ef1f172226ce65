"""Coupling-layer invertible networks and the autoencoder baseline.

A coupling layer updates one half of its input conditioned on the other:

    z1' = z1 * h1(z2) + f1(z2)
    z2' = z2 * h2(z1') + f2(z1')

(the second half sees the already-updated first half), which makes the
inverse available in closed form. The production configuration keeps
h1 = h2 = 1 and f1 = 0 with f2 a small MLP, so only additive updates of
the stress half are learned and round trips cancel exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .mlp import ConstantMap, Mlp, flatten_params, unflatten_params
from .phasespace import NormalizationTransform


class DivideByZeroError(ZeroDivisionError):
    """An h-output hit zero where the inverse map divides by it."""


def _build_internal(arch: dict, rng=None):
    if arch["type"] == "const":
        return ConstantMap(np.asarray(arch["value"], dtype=float))
    if arch["type"] == "mlp":
        return Mlp(arch["layer_sizes"], rng=rng)
    raise ValueError(f"unknown internal function type {arch['type']!r}")


class CouplingLayer:
    """One exactly invertible block with internal functions h1, h2, f1, f2."""

    def __init__(self, split: tuple[int, int], h1, h2, f1, f2):
        self.split = (int(split[0]), int(split[1]))
        self.h1, self.h2, self.f1, self.f2 = h1, h2, f1, f2

    @property
    def n(self) -> int:
        return self.split[0] + self.split[1]

    @property
    def internal_nets(self):
        return [self.h1, self.h2, self.f1, self.f2]

    @property
    def params(self) -> list[np.ndarray]:
        out = []
        for net in self.internal_nets:
            out.extend(net.params)
        return out

    def set_params(self, params: list[np.ndarray]) -> None:
        k = 0
        for net in self.internal_nets:
            n = len(net.params)
            net.set_params(params[k:k + n])
            k += n

    def _split(self, z: np.ndarray):
        m1 = self.split[0]
        return z[..., :m1], z[..., m1:]

    def forward(self, z: np.ndarray) -> np.ndarray:
        out, _ = self.forward_cached(z)
        return out

    def forward_cached(self, z: np.ndarray):
        z = np.asarray(z, dtype=float)
        z1, z2 = self._split(z)
        a, c_h1 = self.h1.forward_cached(z2)
        f1v, c_f1 = self.f1.forward_cached(z2)
        u = z1 * a + f1v
        b, c_h2 = self.h2.forward_cached(u)
        f2v, c_f2 = self.f2.forward_cached(u)
        v = z2 * b + f2v
        cache = (z1, z2, a, u, b, c_h1, c_f1, c_h2, c_f2)
        return np.concatenate([u, v], axis=-1), cache

    def inverse(self, z_out: np.ndarray) -> np.ndarray:
        """Closed-form inverse: recover z2 first, then z1."""
        z_out = np.asarray(z_out, dtype=float)
        u, v = self._split(z_out)
        b = self.h2.forward(u)
        if np.any(b == 0.0):
            raise DivideByZeroError("h2 output has a zero component")
        z2 = (v - self.f2.forward(u)) / b
        a = self.h1.forward(z2)
        if np.any(a == 0.0):
            raise DivideByZeroError("h1 output has a zero component")
        z1 = (u - self.f1.forward(z2)) / a
        return np.concatenate([z1, z2], axis=-1)

    def backprop(self, cache, grad_out: np.ndarray):
        """Loss gradients through the forward map.

        Returns (grad wrt layer input, param gradients aligned with
        ``params``).
        """
        z1, z2, a, u, b, c_h1, c_f1, c_h2, c_f2 = cache
        g = np.asarray(grad_out, dtype=float)
        g1, g2 = self._split(g)
        # v = z2 * b + f2(u)
        gz2 = g2 * b
        gu_h2, gp_h2 = self.h2.backprop(c_h2, g2 * z2)
        gu_f2, gp_f2 = self.f2.backprop(c_f2, g2)
        gu = g1 + gu_h2 + gu_f2
        # u = z1 * a + f1(z2)
        gz1 = gu * a
        gz2_h1, gp_h1 = self.h1.backprop(c_h1, gu * z1)
        gz2_f1, gp_f1 = self.f1.backprop(c_f1, gu)
        gz2 = gz2 + gz2_h1 + gz2_f1
        grads = gp_h1 + gp_h2 + gp_f1 + gp_f2
        # reorder to match params (h1, h2, f1, f2 already in that order)
        return np.concatenate([gz1, gz2], axis=-1), grads

    def arch_dict(self) -> dict:
        return {
            "split": list(self.split),
            "h1": self.h1.arch_dict(),
            "h2": self.h2.arch_dict(),
            "f1": self.f1.arch_dict(),
            "f2": self.f2.arch_dict(),
        }

    @classmethod
    def from_arch(cls, arch: dict, rng=None) -> "CouplingLayer":
        return cls(tuple(arch["split"]),
                   _build_internal(arch["h1"], rng),
                   _build_internal(arch["h2"], rng),
                   _build_internal(arch["f1"], rng),
                   _build_internal(arch["f2"], rng))


class InvertibleNet:
    """Composition of coupling layers; exact forward and inverse maps."""

    def __init__(self, layers: list[CouplingLayer]):
        if not layers:
            raise ValueError("need at least one coupling layer")
        widths = {layer.n for layer in layers}
        if len(widths) != 1:
            raise ValueError("all coupling layers must share the same width")
        self.layers = layers

    @property
    def n(self) -> int:
        return self.layers[0].n

    @property
    def params(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend(layer.params)
        return out

    def set_params(self, params: list[np.ndarray]) -> None:
        k = 0
        for layer in self.layers:
            n = len(layer.params)
            layer.set_params(params[k:k + n])
            k += n

    def forward(self, z: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            z = layer.forward(z)
        return z

    def inverse(self, z: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            z = layer.inverse(z)
        return z

    def forward_cached(self, z: np.ndarray):
        caches = []
        for layer in self.layers:
            z, cache = layer.forward_cached(z)
            caches.append(cache)
        return z, caches

    def backprop(self, caches, grad_out: np.ndarray):
        grads_rev = []
        g = grad_out
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            g, grads = layer.backprop(cache, g)
            grads_rev.append(grads)
        out = []
        for grads in reversed(grads_rev):
            out.extend(grads)
        return g, out

    def arch_dict(self) -> dict:
        return {"type": "invertible", "layers": [l.arch_dict() for l in self.layers]}


class AutoencoderPair:
    """Encoder/decoder MLPs; the inverse map is only approximate."""

    def __init__(self, encoder: Mlp, decoder: Mlp):
        if encoder.n_in != decoder.n_out or encoder.n_out != decoder.n_in:
            raise ValueError("encoder and decoder widths do not line up")
        self.encoder = encoder
        self.decoder = decoder

    @property
    def n(self) -> int:
        return self.encoder.n_in

    @property
    def params(self) -> list[np.ndarray]:
        return self.encoder.params + self.decoder.params

    def set_params(self, params: list[np.ndarray]) -> None:
        n_enc = len(self.encoder.params)
        self.encoder.set_params(params[:n_enc])
        self.decoder.set_params(params[n_enc:])

    def forward(self, z: np.ndarray) -> np.ndarray:
        return self.encoder.forward(z)

    def inverse(self, z: np.ndarray) -> np.ndarray:
        return self.decoder.forward(z)

    def arch_dict(self) -> dict:
        return {"type": "autoencoder",
                "encoder": list(self.encoder.layer_sizes),
                "decoder": list(self.decoder.layer_sizes)}


def nice_coupling(m: int, hidden_units: int, hidden_layers: int,
                  rng: np.random.Generator) -> CouplingLayer:
    """Production coupling block: h1 = h2 = ones, f1 = 0, f2 = elu MLP."""
    sizes = [m] + [hidden_units] * hidden_layers + [m]
    return CouplingLayer((m, m),
                         h1=ConstantMap(np.ones(m)),
                         h2=ConstantMap(np.ones(m)),
                         f1=ConstantMap(np.zeros(m)),
                         f2=Mlp(sizes, rng=rng))


def build_invertible(m: int, hidden_units: int, hidden_layers: int,
                     n_couplings: int = 1,
                     rng: np.random.Generator | None = None) -> InvertibleNet:
    rng = rng if rng is not None else np.random.default_rng(0)
    return InvertibleNet([nice_coupling(m, hidden_units, hidden_layers, rng)
                          for _ in range(n_couplings)])


def build_autoencoder(n: int, hidden_units: int, hidden_layers: int,
                      rng: np.random.Generator | None = None) -> AutoencoderPair:
    rng = rng if rng is not None else np.random.default_rng(0)
    sizes = [n] + [hidden_units] * hidden_layers + [n]
    return AutoencoderPair(Mlp(sizes, rng=rng), Mlp(sizes, rng=rng))


# ---------------------------------------------------------------------------
# serialization: arch descriptor + flat parameter vector + normalization
# ---------------------------------------------------------------------------

FORMAT_NAME = "ddmech-embedding"
FORMAT_VERSION = 1


def _from_arch(arch: dict):
    if arch["type"] == "invertible":
        return InvertibleNet([CouplingLayer.from_arch(a) for a in arch["layers"]])
    if arch["type"] == "autoencoder":
        return AutoencoderPair(Mlp(arch["encoder"]), Mlp(arch["decoder"]))
    raise ValueError(f"unknown architecture type {arch['type']!r}")


def save_embedding(path, net, norm: NormalizationTransform | None) -> None:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "arch": net.arch_dict(),
        "params": flatten_params(net.params).tolist(),
        "norm": norm.to_dict() if norm is not None else None,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_embedding(path):
    """Load a serialized net; returns (net, normalization or None)."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} file")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported version {doc.get('version')}")
    net = _from_arch(doc["arch"])
    net.set_params(unflatten_params(np.asarray(doc["params"], dtype=float), net.params))
    norm = None if doc["norm"] is None else NormalizationTransform.from_dict(doc["norm"])
    return net, norm
