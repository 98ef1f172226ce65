"""Analytic constitutive laws behind the synthetic databases.

Each law exposes the generalized stress and its tangent so the same object
can synthesize a database and drive the model-based reference solver.
Stress/strain vectors follow the package-wide Voigt convention: engineering
shear (gamma = 2*eps_12) in the strain vector, plain components in the
stress vector, so the Voigt dot product equals the tensor contraction.
"""

from __future__ import annotations

import numpy as np

BAR_ALPHA_M = 1000.0  # MPa, saturation stress of the tanh bar law
BAR_ALPHA_S = 60.0  # slope parameter of the tanh bar law
BAR_MODULUS = 42694.67  # MPa, C = S^{-1} used for bar and truss runs
HEAT_C_SCALE = 0.42  # metric scale for the conduction runs


class DomainError(ValueError):
    """Strain state outside the domain of the strain-energy function."""


class TanhBarLaw:
    """Uniaxial law sigma = alpha_m * tanh(alpha_s * eps), m = 1."""

    m = 1

    def __init__(self, alpha_m: float = BAR_ALPHA_M, alpha_s: float = BAR_ALPHA_S):
        self.alpha_m = alpha_m
        self.alpha_s = alpha_s

    def stress(self, eps: np.ndarray) -> np.ndarray:
        return self.alpha_m * np.tanh(self.alpha_s * np.asarray(eps, dtype=float))

    def tangent(self, eps: np.ndarray) -> np.ndarray:
        eps = np.asarray(eps, dtype=float)
        sech2 = 1.0 / np.cosh(self.alpha_s * eps) ** 2
        d = self.alpha_m * self.alpha_s * sech2
        return d.reshape(eps.shape + (1,)) if eps.ndim else d

    def strain(self, sig: np.ndarray) -> np.ndarray:
        """Inverse law, valid for |sig| < alpha_m."""
        return np.arctanh(np.asarray(sig, dtype=float) / self.alpha_m) / self.alpha_s


class TanhFluxLaw:
    """Conduction law q = tanh(grad T) applied componentwise, m = 2."""

    m = 2

    def stress(self, grad: np.ndarray) -> np.ndarray:
        return np.tanh(np.asarray(grad, dtype=float))

    def tangent(self, grad: np.ndarray) -> np.ndarray:
        grad = np.asarray(grad, dtype=float)
        sech2 = 1.0 / np.cosh(grad) ** 2
        out = np.zeros(grad.shape + (2,))
        out[..., 0, 0] = sech2[..., 0]
        out[..., 1, 1] = sech2[..., 1]
        return out


class PlaneStrainLaw:
    """Hyperelastic plane-strain law from a logarithmic volumetric energy.

    psi(eps) = 1/2 (1 + 2 tr - 2 log(1 + tr)) + 1/2 log^2(1 + tr) + eps:eps
    with tr = eps_kk, so that sigma_ij = (1 - 1/(1+tr) + log(1+tr)/(1+tr)) delta_ij
    + 2 eps_ij. Voigt vectors are (eps_11, eps_22, gamma_12) and
    (sig_11, sig_22, sig_12); everything is dimensionless.
    """

    m = 3

    @staticmethod
    def _trace(eps_v: np.ndarray) -> np.ndarray:
        t = eps_v[..., 0] + eps_v[..., 1]
        if np.any(1.0 + t <= 0.0):
            raise DomainError("1 + tr(eps) must stay positive")
        return t

    def energy(self, eps_v: np.ndarray) -> np.ndarray:
        eps_v = np.asarray(eps_v, dtype=float)
        t = self._trace(eps_v)
        log1t = np.log1p(t)
        quad = eps_v[..., 0] ** 2 + eps_v[..., 1] ** 2 + 0.5 * eps_v[..., 2] ** 2
        return 0.5 * (1.0 + 2.0 * t - 2.0 * log1t) + 0.5 * log1t**2 + quad

    def stress(self, eps_v: np.ndarray) -> np.ndarray:
        eps_v = np.asarray(eps_v, dtype=float)
        t = self._trace(eps_v)
        log1t = np.log1p(t)
        h = 1.0 - 1.0 / (1.0 + t) + log1t / (1.0 + t)
        sig = np.empty_like(eps_v)
        sig[..., 0] = h + 2.0 * eps_v[..., 0]
        sig[..., 1] = h + 2.0 * eps_v[..., 1]
        sig[..., 2] = eps_v[..., 2]  # sig_12 = 2 eps_12 = gamma_12
        return sig

    def tangent(self, eps_v: np.ndarray) -> np.ndarray:
        eps_v = np.asarray(eps_v, dtype=float)
        t = self._trace(eps_v)
        g = (2.0 - np.log1p(t)) / (1.0 + t) ** 2
        out = np.zeros(eps_v.shape[:-1] + (3, 3))
        out[..., 0, 0] = 2.0 + g
        out[..., 0, 1] = g
        out[..., 1, 0] = g
        out[..., 1, 1] = 2.0 + g
        out[..., 2, 2] = 1.0
        return out


def bar_metric() -> np.ndarray:
    """1x1 phase-space metric C for the bar and truss problems."""
    return np.array([[BAR_MODULUS]])


def heat_metric() -> np.ndarray:
    """2x2 phase-space metric C for the conduction problem."""
    return HEAT_C_SCALE * np.eye(2)


def planestrain_metric() -> np.ndarray:
    """Hessian of the plane-strain energy at zero strain (Voigt form)."""
    return np.array([[4.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 1.0]])
