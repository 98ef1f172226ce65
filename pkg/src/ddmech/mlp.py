"""Small dense networks with hand-rolled reverse-mode gradients.

Hidden layers use the exponential linear unit, the output layer is linear.
All evaluations are batched: inputs are (batch, n_in) arrays. Parameters
live in a flat list [W1, b1, W2, b2, ...] so the optimizer and the
serializers can treat every network uniformly.
"""

from __future__ import annotations

import numpy as np


def elu(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, x, np.expm1(x))


def elu_prime(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, 1.0, np.exp(np.minimum(x, 0.0)))


class Mlp:
    """Fully connected network: elu hidden activations, identity output."""

    def __init__(self, layer_sizes, rng: np.random.Generator | None = None):
        self.layer_sizes = tuple(int(s) for s in layer_sizes)
        if len(self.layer_sizes) < 2:
            raise ValueError("need at least an input and an output layer")
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for n_in, n_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            if rng is None:
                w = np.zeros((n_in, n_out))
                b = np.zeros(n_out)
            else:
                # uniform Kaiming: weights bounded by sqrt(6 / fan_in)
                bound = np.sqrt(6.0 / n_in)
                w = rng.uniform(-bound, bound, size=(n_in, n_out))
                b = rng.uniform(-1.0 / np.sqrt(n_in), 1.0 / np.sqrt(n_in), size=n_out)
            self.weights.append(w)
            self.biases.append(b)

    @property
    def n_in(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_out(self) -> int:
        return self.layer_sizes[-1]

    @property
    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def set_params(self, params: list[np.ndarray]) -> None:
        n = len(self.weights)
        if len(params) != 2 * n:
            raise ValueError("parameter list has the wrong length")
        for i in range(n):
            self.weights[i] = np.asarray(params[2 * i], dtype=float).reshape(self.weights[i].shape)
            self.biases[i] = np.asarray(params[2 * i + 1], dtype=float).reshape(self.biases[i].shape)

    def forward(self, x: np.ndarray) -> np.ndarray:
        y, _ = self.forward_cached(x)
        return y

    def forward_cached(self, x: np.ndarray):
        """Forward pass keeping the per-layer inputs and pre-activations."""
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
        inputs, preacts = [], []
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(h)
            s = h @ w + b
            preacts.append(s)
            h = s if i == last else elu(s)
        cache = (inputs, preacts, squeeze)
        return (h[0] if squeeze else h), cache

    def backprop(self, cache, grad_out: np.ndarray):
        """Gradients of a scalar loss given d(loss)/d(output).

        Returns (grad wrt input, param gradients aligned with ``params``).
        """
        inputs, preacts, squeeze = cache
        g = np.asarray(grad_out, dtype=float)
        if squeeze:
            g = g[None, :]
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            if i < len(self.weights) - 1:
                g = g * elu_prime(preacts[i])
            grads_w[i] = inputs[i].T @ g
            grads_b[i] = g.sum(axis=0)
            g = g @ self.weights[i].T
        grads = []
        for gw, gb in zip(grads_w, grads_b):
            grads.extend([gw, gb])
        return (g[0] if squeeze else g), grads

    def arch_dict(self) -> dict:
        return {"type": "mlp", "layer_sizes": list(self.layer_sizes)}


class ConstantMap:
    """Constant vector function with no trainable parameters."""

    def __init__(self, value: np.ndarray):
        self.value = np.atleast_1d(np.asarray(value, dtype=float))

    @property
    def n_out(self) -> int:
        return self.value.shape[0]

    @property
    def params(self) -> list[np.ndarray]:
        return []

    def set_params(self, params) -> None:
        if params:
            raise ValueError("constant map has no parameters")

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return self.value.copy()
        return np.broadcast_to(self.value, (x.shape[0], self.n_out)).copy()

    def forward_cached(self, x: np.ndarray):
        return self.forward(x), np.asarray(x, dtype=float).shape

    def backprop(self, cache, grad_out: np.ndarray):
        input_shape = cache
        return np.zeros(input_shape), []

    def arch_dict(self) -> dict:
        return {"type": "const", "value": self.value.tolist()}


def flatten_params(params: list[np.ndarray]) -> np.ndarray:
    if not params:
        return np.zeros(0)
    return np.concatenate([p.ravel() for p in params])


def unflatten_params(flat: np.ndarray, like: list[np.ndarray]) -> list[np.ndarray]:
    out, k = [], 0
    for p in like:
        out.append(np.asarray(flat[k:k + p.size], dtype=float).reshape(p.shape))
        k += p.size
    if k != len(flat):
        raise ValueError("flat vector length does not match parameter shapes")
    return out
