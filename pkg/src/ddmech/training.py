"""Training of the embedding networks against the linearity objective.

The invertible net minimizes the mean squared violation of sig_hat =
K_fix * eps_hat over the (normalized) database; the autoencoder adds the
reconstruction term with unit weight. Optimization is adaptive-moment
gradient descent with a plateau-based learning-rate schedule: after the
warm-up iteration count, the rate shrinks by ``lr_factor`` whenever the
best loss has not improved by more than ``plateau_threshold`` for
``plateau_patience`` consecutive iterations, floored at ``lr_min``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .invertible import AutoencoderPair, InvertibleNet
from .phasespace import MaterialDatabase


class NonFiniteLossError(FloatingPointError):
    """Loss became NaN/Inf; usually signals a bad learning rate."""


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and schedule settings (defaults: the 1D toy problem)."""

    initial_lr: float = 5e-3
    lr_factor: float = 0.91
    plateau_patience: int = 50
    plateau_threshold: float = 1e-8
    lr_min: float = 1e-6
    warmup_iters: int = 2000
    max_epochs: int = 30000  # cap on optimizer iterations
    batch: int | None = None  # None = full batch
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.lr_factor < 1.0:
            raise ValueError("lr_factor must lie in (0, 1)")
        if self.lr_min >= self.initial_lr:
            raise ValueError("lr_min must be below the initial learning rate")

    def with_overrides(self, **kwargs) -> "TrainConfig":
        return replace(self, **kwargs)


class Adam:
    """Adaptive-moment gradient descent (beta1=0.9, beta2=0.999, eps=1e-8)."""

    def __init__(self, params: list[np.ndarray], beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray], lr: float) -> None:
        self.t += 1
        b1t = 1.0 - self.beta1**self.t
        b2t = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)


class PlateauScheduler:
    """Best-loss tracking learning-rate reduction with a warm-up gate."""

    def __init__(self, cfg: TrainConfig):
        self.lr = cfg.initial_lr
        self.factor = cfg.lr_factor
        self.patience = cfg.plateau_patience
        self.threshold = cfg.plateau_threshold
        self.lr_min = cfg.lr_min
        self.warmup = cfg.warmup_iters
        self.best = np.inf
        self.bad = 0

    def step(self, loss: float, iteration: int) -> float:
        if loss < self.best - self.threshold:
            self.best = loss
            self.bad = 0
        else:
            self.bad += 1
        if iteration >= self.warmup and self.bad > self.patience:
            self.lr = max(self.lr * self.factor, self.lr_min)
            self.bad = 0
        return self.lr


@dataclass
class TrainResult:
    net: object
    history: list[tuple] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.history[-1][1] if self.history else np.inf


def _require_normalized(db: MaterialDatabase) -> None:
    if db.norm is None:
        raise ValueError("train on a normalized database (see phasespace.normalize)")


def linearity_loss_grad(net, z: np.ndarray, m: int, k_fix: np.ndarray):
    """Mean squared violation of sig_hat = K_fix eps_hat and its gradients."""
    z_hat, caches = net.forward_cached(z)
    r = z_hat[:, m:] - z_hat[:, :m] @ k_fix.T
    n_terms = r.size
    loss = float(np.sum(r * r) / n_terms)
    grad_out = np.empty_like(z_hat)
    grad_out[:, m:] = 2.0 * r / n_terms
    grad_out[:, :m] = -2.0 * (r @ k_fix) / n_terms
    _, grads = net.backprop(caches, grad_out)
    return loss, grads


def linearity_loss(net, z: np.ndarray, m: int, k_fix: np.ndarray) -> float:
    z_hat = net.forward(z)
    r = z_hat[:, m:] - z_hat[:, :m] @ k_fix.T
    return float(np.sum(r * r) / r.size)


def autoencoder_loss_grad(pair: AutoencoderPair, z: np.ndarray, m: int,
                          k_fix: np.ndarray):
    """Joint linearity + reconstruction loss (unit weights) and gradients."""
    z_hat, c_enc = pair.encoder.forward_cached(z)
    z_rec, c_dec = pair.decoder.forward_cached(z_hat)
    r_lin = z_hat[:, m:] - z_hat[:, :m] @ k_fix.T
    r_rec = z_rec - z
    loss_lin = float(np.sum(r_lin * r_lin) / r_lin.size)
    loss_rec = float(np.sum(r_rec * r_rec) / r_rec.size)
    g_rec_out = 2.0 * r_rec / r_rec.size
    g_hat_from_dec, grads_dec = pair.decoder.backprop(c_dec, g_rec_out)
    g_hat = g_hat_from_dec.copy()
    g_hat[:, m:] += 2.0 * r_lin / r_lin.size
    g_hat[:, :m] += -2.0 * (r_lin @ k_fix) / r_lin.size
    _, grads_enc = pair.encoder.backprop(c_enc, g_hat)
    return loss_lin, loss_rec, grads_enc + grads_dec


def autoencoder_losses(pair: AutoencoderPair, z: np.ndarray, m: int,
                       k_fix: np.ndarray) -> tuple[float, float]:
    z_hat = pair.encoder.forward(z)
    z_rec = pair.decoder.forward(z_hat)
    r_lin = z_hat[:, m:] - z_hat[:, :m] @ k_fix.T
    r_rec = z_rec - z
    return (float(np.sum(r_lin * r_lin) / r_lin.size),
            float(np.sum(r_rec * r_rec) / r_rec.size))


def _batches(n: int, batch: int | None, rng: np.random.Generator):
    if batch is None or batch >= n:
        yield np.arange(n)
        return
    order = rng.permutation(n)
    for k in range(0, n, batch):
        yield order[k:k + batch]


def train_invertible(db: MaterialDatabase, net: InvertibleNet,
                     cfg: TrainConfig, k_fix: np.ndarray | None = None) -> TrainResult:
    """Fit the invertible net to the linearity objective on a normalized db.

    History rows are (iteration, full-data loss); the loss trend is
    monitored on the full database even when training in mini-batches.
    """
    _require_normalized(db)
    m = db.m
    k_fix = np.eye(m) if k_fix is None else np.asarray(k_fix, dtype=float)
    z = db.as_array()
    rng = np.random.default_rng(cfg.seed)
    params = net.params
    adam = Adam(params)
    sched = PlateauScheduler(cfg)
    history: list[tuple] = []
    it = 0
    for _ in range(cfg.max_epochs):
        if it >= cfg.max_epochs:
            break
        for idx in _batches(db.n_points, cfg.batch, rng):
            _, grads = linearity_loss_grad(net, z[idx], m, k_fix)
            adam.step(params, grads, sched.lr)
            it += 1
            loss = linearity_loss(net, z, m, k_fix)
            if not np.isfinite(loss):
                raise NonFiniteLossError(f"loss diverged at iteration {it}")
            sched.step(loss, it)
            history.append((it, loss))
            if it >= cfg.max_epochs:
                break
    return TrainResult(net=net, history=history)


def train_autoencoder(db: MaterialDatabase, pair: AutoencoderPair,
                      cfg: TrainConfig, k_fix: np.ndarray | None = None) -> TrainResult:
    """Fit the autoencoder baseline; history rows are (it, lin, rec)."""
    _require_normalized(db)
    m = db.m
    k_fix = np.eye(m) if k_fix is None else np.asarray(k_fix, dtype=float)
    z = db.as_array()
    rng = np.random.default_rng(cfg.seed)
    params = pair.params
    adam = Adam(params)
    sched = PlateauScheduler(cfg)
    history: list[tuple] = []
    it = 0
    for _ in range(cfg.max_epochs):
        if it >= cfg.max_epochs:
            break
        for idx in _batches(db.n_points, cfg.batch, rng):
            _, _, grads = autoencoder_loss_grad(pair, z[idx], m, k_fix)
            adam.step(params, grads, sched.lr)
            it += 1
            lin, rec = autoencoder_losses(pair, z, m, k_fix)
            total = lin + rec
            if not np.isfinite(total):
                raise NonFiniteLossError(f"loss diverged at iteration {it}")
            sched.step(total, it)
            history.append((it, lin, rec))
            if it >= cfg.max_epochs:
                break
    return TrainResult(net=pair, history=history)


def repeated_roundtrip_drift(mapping, points: np.ndarray, n_cycles: int) -> np.ndarray:
    """Max reconstruction error over the batch after each forward/backward cycle."""
    if n_cycles < 1:
        raise ValueError("need at least one cycle")
    z0 = np.atleast_2d(np.asarray(points, dtype=float))
    z = z0.copy()
    drift = np.empty(n_cycles)
    for c in range(n_cycles):
        z = mapping.inverse(mapping.forward(z))
        drift[c] = np.linalg.norm(z - z0, axis=1).max()
    return drift


def history_to_csv(path, history: list[tuple]) -> None:
    """Loss history CSV: iter,loss[,reconstruction_loss]."""
    if not history:
        raise ValueError("empty history")
    with_rec = len(history[0]) == 3
    header = ["iter", "loss", "reconstruction_loss"] if with_rec else ["iter", "loss"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in history:
            writer.writerow([row[0]] + [repr(v) for v in row[1:]])
