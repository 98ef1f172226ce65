"""Local projections: energy-norm nearest neighbor and manifold embedding.

The nearest-neighbor route measures distance with the C/S energy metric;
pre-multiplying strain by chol(C/2)^T and stress by chol(S/2)^T turns that
metric into the plain Euclidean one, so a kd-tree over the transformed
points accelerates the search exactly. The manifold route maps a query
through the trained net, drops it onto the hyperplane sig = K eps in
closed form, and maps back.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .linalg import check_spd_small, cholesky_small, inv_spd_small
from .phasespace import MaterialDatabase, NormalizationTransform, PhasePoint

BRUTE_FORCE_THRESHOLD = 500


class EnergyMetric:
    """C/S-weighted quadratic metric on phase space (S = C^{-1})."""

    def __init__(self, C: np.ndarray, S: np.ndarray | None = None):
        self.C = check_spd_small(C)
        self.S = inv_spd_small(self.C) if S is None else check_spd_small(S)
        if np.abs(self.S @ self.C - np.eye(self.m)).max() > 1e-10:
            raise ValueError("S must be the inverse of C")

    @property
    def m(self) -> int:
        return self.C.shape[0]

    def distance2(self, eps_a, sig_a, eps_b, sig_b) -> np.ndarray | float:
        de = np.asarray(eps_a, dtype=float) - np.asarray(eps_b, dtype=float)
        ds = np.asarray(sig_a, dtype=float) - np.asarray(sig_b, dtype=float)
        out = 0.5 * np.sum((de @ self.C) * de, axis=-1) \
            + 0.5 * np.sum((ds @ self.S) * ds, axis=-1)
        return out

    def isometry(self) -> tuple[np.ndarray, np.ndarray]:
        """Matrices (Le, Ls) with d2 = |Le de|^2 + |Ls ds|^2."""
        le = cholesky_small(0.5 * self.C).T
        ls = cholesky_small(0.5 * self.S).T
        return le, ls

    def transform_points(self, eps: np.ndarray, sig: np.ndarray) -> np.ndarray:
        le, ls = self.isometry()
        eps = np.atleast_2d(np.asarray(eps, dtype=float))
        sig = np.atleast_2d(np.asarray(sig, dtype=float))
        return np.hstack([eps @ le.T, sig @ ls.T])


def energy_distance2(z: PhasePoint, z_star: PhasePoint, metric: EnergyMetric) -> float:
    """Squared energy distance 1/2 de:C:de + 1/2 ds:S:ds."""
    if z.m != z_star.m or z.m != metric.m:
        raise ValueError("component counts do not match")
    return float(metric.distance2(z.eps, z.sig, z_star.eps, z_star.sig))


class NnIndex:
    """Nearest-neighbor search over a database under an energy metric.

    Below ``brute_threshold`` points the scan is exhaustive; above it a
    kd-tree over isometrically transformed points proposes candidates that
    are re-ranked with the same squared-distance formula the brute force
    uses, so both paths always return the same index (ties break to the
    lowest database index).
    """

    def __init__(self, db: MaterialDatabase, metric: EnergyMetric | None = None,
                 brute_threshold: int = BRUTE_FORCE_THRESHOLD):
        if db.n_points == 0:
            raise ValueError("cannot index an empty database")
        self.db = db
        self.metric = metric if metric is not None else EnergyMetric(db.C, db.S)
        if self.metric.m != db.m:
            raise ValueError("metric dimension does not match the database")
        self._points = self.metric.transform_points(db.eps, db.sig)
        self._tree = cKDTree(self._points) if db.n_points >= brute_threshold else None

    def _d2_to(self, q: np.ndarray, idx: np.ndarray) -> np.ndarray:
        diff = self._points[idx] - q
        return np.sum(diff * diff, axis=-1)

    def brute_force_batch(self, eps: np.ndarray, sig: np.ndarray) -> np.ndarray:
        q = self.metric.transform_points(eps, sig)
        d2 = np.sum((self._points[None, :, :] - q[:, None, :]) ** 2, axis=-1)
        return np.argmin(d2, axis=1)

    def query_batch(self, eps: np.ndarray, sig: np.ndarray) -> np.ndarray:
        if self._tree is None:
            return self.brute_force_batch(eps, sig)
        q = self.metric.transform_points(eps, sig)
        k = min(4, self.db.n_points)
        _, cand = self._tree.query(q, k=k)
        cand = np.atleast_2d(cand)
        out = np.empty(q.shape[0], dtype=int)
        for i in range(q.shape[0]):
            idx = np.sort(cand[i])
            d2 = self._d2_to(q[i], idx)
            out[i] = idx[np.argmin(d2)]
        return out

    def query(self, z: PhasePoint) -> int:
        return int(self.query_batch(z.eps[None, :], z.sig[None, :])[0])


def nn_project(z: PhasePoint, index: NnIndex) -> PhasePoint:
    """Closest database member to z under the index's energy metric."""
    return index.db.point(index.query(z))


def project_to_hyperplane(eps_h: np.ndarray, sig_h: np.ndarray,
                          k: np.ndarray, k_inv: np.ndarray):
    """Closed-form closest point on sig = K eps in the mapped metric."""
    eps_p = 0.5 * (eps_h + sig_h @ k_inv.T)
    sig_p = 0.5 * (sig_h + eps_h @ k.T)
    return eps_p, sig_p


class ManifoldProjector:
    """Local projection through a trained embedding.

    Owns the database normalization, so callers pass physical units:
    normalize, map forward, project onto the hyperplane, map backward,
    denormalize.
    """

    def __init__(self, net, norm: NormalizationTransform,
                 k_fix: np.ndarray | None = None):
        self.net = net
        self.norm = norm
        m = net.n // 2
        self.k_fix = np.eye(m) if k_fix is None else check_spd_small(k_fix)
        self.k_inv = inv_spd_small(self.k_fix)

    @property
    def m(self) -> int:
        return self.net.n // 2

    def map_forward(self, eps: np.ndarray, sig: np.ndarray) -> np.ndarray:
        """Normalized query mapped into the embedding space."""
        eps_n, sig_n = self.norm.apply(np.asarray(eps, dtype=float),
                                       np.asarray(sig, dtype=float))
        return self.net.forward(np.concatenate([eps_n, sig_n], axis=-1))

    def project_batch(self, eps: np.ndarray, sig: np.ndarray):
        m = self.m
        z_hat = self.map_forward(eps, sig)
        eps_p, sig_p = project_to_hyperplane(z_hat[..., :m], z_hat[..., m:],
                                             self.k_fix, self.k_inv)
        back = self.net.inverse(np.concatenate([eps_p, sig_p], axis=-1))
        return self.norm.invert(back[..., :m], back[..., m:])

    def project(self, z: PhasePoint) -> PhasePoint:
        eps, sig = self.project_batch(z.eps, z.sig)
        return PhasePoint(eps, sig)

    def residual(self, z: PhasePoint) -> float:
        """Hyperplane violation |sig_hat - K eps_hat| at the mapped query."""
        m = self.m
        z_hat = self.map_forward(z.eps, z.sig)
        return float(np.linalg.norm(z_hat[..., m:] - z_hat[..., :m] @ self.k_fix.T))

    def interpolate(self, za: PhasePoint, zb: PhasePoint, alpha: float) -> PhasePoint:
        """Convex combination in the embedding, mapped back to phase space."""
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        ha = self.map_forward(za.eps, za.sig)
        hb = self.map_forward(zb.eps, zb.sig)
        back = self.net.inverse(alpha * ha + (1.0 - alpha) * hb)
        m = self.m
        return PhasePoint(*self.norm.invert(back[..., :m], back[..., m:]))


def manifold_project(z: PhasePoint, projector: ManifoldProjector) -> PhasePoint:
    return projector.project(z)


def hyperplane_residual(z: PhasePoint, projector: ManifoldProjector) -> float:
    return projector.residual(z)


def convex_interpolate(za: PhasePoint, zb: PhasePoint, alpha: float,
                       projector: ManifoldProjector) -> PhasePoint:
    return projector.interpolate(za, zb, alpha)
