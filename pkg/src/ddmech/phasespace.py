"""Phase-space data model and the synthetic material databases.

A phase point pairs a generalized strain with a generalized stress; a
database is a point cloud of such pairs plus the metric tensors C and
S = C^{-1} and, once normalized, the affine transform that maps every
component into (0, 1].
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import laws
from .linalg import check_spd_small, inv_spd_small

NORMALIZATION_FLOOR = 1e-3


class DegenerateRangeError(ValueError):
    """A component of the database is constant; handled by the floor rule."""


@dataclass(frozen=True)
class PhasePoint:
    """One (eps, sig) pair; the atom of databases and solver states."""

    eps: np.ndarray
    sig: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eps", np.atleast_1d(np.asarray(self.eps, dtype=float)))
        object.__setattr__(self, "sig", np.atleast_1d(np.asarray(self.sig, dtype=float)))
        if self.eps.shape != self.sig.shape:
            raise ValueError("eps and sig must have the same length")
        if not (np.all(np.isfinite(self.eps)) and np.all(np.isfinite(self.sig))):
            raise ValueError("phase point has non-finite entries")

    @property
    def m(self) -> int:
        return self.eps.shape[0]

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.eps, self.sig])


@dataclass(frozen=True)
class VoigtConvention:
    """Packing of symmetric 2nd-order tensors into length-m vectors.

    Strain vectors use engineering shear (off-diagonal entries doubled) so
    the plain dot product of a strain vector with a stress vector equals
    the tensor double contraction.
    """

    dim: int

    @property
    def m(self) -> int:
        return self.dim * (self.dim + 1) // 2

    @property
    def _pairs(self) -> list[tuple[int, int]]:
        diag = [(i, i) for i in range(self.dim)]
        off = [(i, j) for i in range(self.dim) for j in range(i + 1, self.dim)]
        return diag + off

    def strain_to_voigt(self, tensor: np.ndarray) -> np.ndarray:
        tensor = np.asarray(tensor, dtype=float)
        return np.array([tensor[i, j] if i == j else 2.0 * tensor[i, j]
                         for i, j in self._pairs])

    def stress_to_voigt(self, tensor: np.ndarray) -> np.ndarray:
        tensor = np.asarray(tensor, dtype=float)
        return np.array([tensor[i, j] for i, j in self._pairs])

    def strain_from_voigt(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        for k, (i, j) in enumerate(self._pairs):
            val = vec[k] if i == j else 0.5 * vec[k]
            out[i, j] = out[j, i] = val
        return out


@dataclass(frozen=True)
class NormalizationTransform:
    """Per-component affine map of (eps, sig) onto [floor, 1].

    Constant components map to the constant 1.0 and invert back to their
    original value.
    """

    eps_min: np.ndarray
    eps_max: np.ndarray
    sig_min: np.ndarray
    sig_max: np.ndarray
    floor: float = NORMALIZATION_FLOOR

    def _scales(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        span = hi - lo
        with np.errstate(divide="ignore"):
            scale = np.where(span > 0.0, (1.0 - self.floor) / np.where(span > 0, span, 1.0), 0.0)
        return scale

    def apply(self, eps: np.ndarray, sig: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        se = self._scales(self.eps_min, self.eps_max)
        ss = self._scales(self.sig_min, self.sig_max)
        eps_n = np.where(se > 0.0, self.floor + (eps - self.eps_min) * se, 1.0)
        sig_n = np.where(ss > 0.0, self.floor + (sig - self.sig_min) * ss, 1.0)
        return eps_n, sig_n

    def invert(self, eps_n: np.ndarray, sig_n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        se = self._scales(self.eps_min, self.eps_max)
        ss = self._scales(self.sig_min, self.sig_max)
        eps = np.where(se > 0.0, self.eps_min + (eps_n - self.floor) / np.where(se > 0, se, 1.0),
                       self.eps_min)
        sig = np.where(ss > 0.0, self.sig_min + (sig_n - self.floor) / np.where(ss > 0, ss, 1.0),
                       self.sig_min)
        return eps, sig

    def apply_point(self, z: PhasePoint) -> PhasePoint:
        return PhasePoint(*self.apply(z.eps, z.sig))

    def invert_point(self, z: PhasePoint) -> PhasePoint:
        return PhasePoint(*self.invert(z.eps, z.sig))

    def to_dict(self) -> dict:
        return {
            "eps_min": self.eps_min.tolist(),
            "eps_max": self.eps_max.tolist(),
            "sig_min": self.sig_min.tolist(),
            "sig_max": self.sig_max.tolist(),
            "floor": self.floor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationTransform":
        return cls(
            eps_min=np.asarray(d["eps_min"], dtype=float),
            eps_max=np.asarray(d["eps_max"], dtype=float),
            sig_min=np.asarray(d["sig_min"], dtype=float),
            sig_max=np.asarray(d["sig_max"], dtype=float),
            floor=float(d["floor"]),
        )


@dataclass
class MaterialDatabase:
    """Point cloud of phase points with metric tensors C and S = C^{-1}."""

    eps: np.ndarray
    sig: np.ndarray
    C: np.ndarray = None
    S: np.ndarray = None
    norm: NormalizationTransform | None = field(default=None)

    def __post_init__(self):
        self.eps = np.atleast_2d(np.asarray(self.eps, dtype=float))
        self.sig = np.atleast_2d(np.asarray(self.sig, dtype=float))
        if self.eps.shape != self.sig.shape:
            raise ValueError("eps and sig arrays must have matching shapes")
        if not (np.all(np.isfinite(self.eps)) and np.all(np.isfinite(self.sig))):
            raise ValueError("database contains non-finite entries")
        if self.C is None:
            self.C = np.eye(self.m)
        self.C = check_spd_small(self.C)
        if self.S is None:
            self.S = inv_spd_small(self.C)
        self.S = check_spd_small(self.S)
        resid = np.abs(self.S @ self.C - np.eye(self.m)).max()
        if resid > 1e-10:
            raise ValueError(f"S is not the inverse of C (residual {resid:.2e})")

    @property
    def n_points(self) -> int:
        return self.eps.shape[0]

    @property
    def m(self) -> int:
        return self.eps.shape[1]

    def point(self, i: int) -> PhasePoint:
        return PhasePoint(self.eps[i], self.sig[i])

    def points(self):
        return (self.point(i) for i in range(self.n_points))

    def as_array(self) -> np.ndarray:
        return np.hstack([self.eps, self.sig])

    def subset(self, idx: np.ndarray) -> "MaterialDatabase":
        return MaterialDatabase(self.eps[idx], self.sig[idx], C=self.C, S=self.S,
                                norm=self.norm)

    def to_csv(self, path) -> None:
        m = self.m
        header = [f"eps_{k + 1}" for k in range(m)] + [f"sig_{k + 1}" for k in range(m)]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in self.as_array():
                writer.writerow([repr(v) for v in row])

    @classmethod
    def from_csv(cls, path, C: np.ndarray | None = None) -> "MaterialDatabase":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            m = sum(1 for name in header if name.startswith("eps_"))
            if m == 0 or len(header) != 2 * m:
                raise ValueError(f"unrecognized database header {header}")
            data = np.array([[float(v) for v in row] for row in reader])
        return cls(eps=data[:, :m], sig=data[:, m:], C=C)


def normalize(db: MaterialDatabase, floor: float = NORMALIZATION_FLOOR) -> MaterialDatabase:
    """Map every component of the database into [floor, 1].

    Constant components collapse to 1.0 (degenerate-range rule); all other
    components get a strictly monotone affine map, recorded on the result
    for inversion.
    """
    if db.n_points == 0:
        raise ValueError("cannot normalize an empty database")
    transform = NormalizationTransform(
        eps_min=db.eps.min(axis=0), eps_max=db.eps.max(axis=0),
        sig_min=db.sig.min(axis=0), sig_max=db.sig.max(axis=0), floor=floor)
    eps_n, sig_n = transform.apply(db.eps, db.sig)
    return MaterialDatabase(eps_n, sig_n, C=db.C, S=db.S, norm=transform)


# ---------------------------------------------------------------------------
# database generators
# ---------------------------------------------------------------------------

def gen_bar_tanh(n: int = 41, eps_range: tuple[float, float] = (-0.03, 0.03)) -> MaterialDatabase:
    """Uniaxial tanh database: n equally spaced strains on eps_range."""
    if n < 2:
        raise ValueError("need at least two points")
    law = laws.TanhBarLaw()
    eps = np.linspace(eps_range[0], eps_range[1], n)
    return MaterialDatabase(eps[:, None], law.stress(eps)[:, None], C=laws.bar_metric())


def default_incomplete_removal(n: int = 41,
                               eps_range: tuple[float, float] = (-0.03, 0.03),
                               band: tuple[float, float] = (0.012, 0.024)) -> np.ndarray:
    """Indices whose |eps| falls in the tanh-knee band (removed points)."""
    eps = np.linspace(eps_range[0], eps_range[1], n)
    tol = 1e-12
    return np.where((np.abs(eps) >= band[0] - tol) & (np.abs(eps) <= band[1] + tol))[0]


def gen_bar_incomplete(removal: np.ndarray | None = None) -> MaterialDatabase:
    """The 41-point tanh database minus a removal set at the knee regions."""
    full = gen_bar_tanh()
    if removal is None:
        removal = default_incomplete_removal()
    keep = np.setdiff1d(np.arange(full.n_points), np.asarray(removal, dtype=int))
    return full.subset(keep)


def gen_sqrt_toy(n: int = 20) -> MaterialDatabase:
    """Toy database sigma = sqrt(eps), regular strain sampling on (0, 1]."""
    if n < 2:
        raise ValueError("need at least two points")
    eps = np.arange(1, n + 1) / n
    return MaterialDatabase(eps[:, None], np.sqrt(eps)[:, None], C=np.eye(1))


def gen_heat_tanh(grid_n: int = 20) -> MaterialDatabase:
    """Conduction database q = tanh(g) on a grid_n x grid_n grid over [-1,1]^2."""
    law = laws.TanhFluxLaw()
    axis = np.linspace(-1.0, 1.0, grid_n)
    g1, g2 = np.meshgrid(axis, axis, indexing="ij")
    grad = np.column_stack([g1.ravel(), g2.ravel()])
    return MaterialDatabase(grad, law.stress(grad), C=laws.heat_metric())


# tensor-component sampling ranges (eps_11, eps_22, eps_12)
PLANESTRAIN_RANGES = ((-0.335, 0.0155), (0.12, 1.0), (-0.03, 0.03))


def gen_planestrain(grid: tuple[int, int, int] = (10, 10, 10)) -> MaterialDatabase:
    """Plane-strain database sampled from the logarithmic strain energy.

    Regular grid over the tensor-component ranges of PLANESTRAIN_RANGES;
    the stored strain vector carries engineering shear (gamma = 2 eps_12),
    stresses come from the analytic gradient of the energy.
    """
    law = laws.PlaneStrainLaw()
    axes = [np.linspace(lo, hi, g) for (lo, hi), g in zip(PLANESTRAIN_RANGES, grid)]
    e1, e2, e12 = np.meshgrid(*axes, indexing="ij")
    eps = np.column_stack([e1.ravel(), e2.ravel(), 2.0 * e12.ravel()])
    return MaterialDatabase(eps, law.stress(eps), C=laws.planestrain_metric())
