"""Laplace-Beltrami eigenpairs on spheres, symmetry groups and the
block perturbation factor F(x, y) = sum_j (|x_j|/|zeta|) phi(x_j/|x_j|).

Eigenfunctions are zonal (axis e_1) representatives normalized to unit
mean square, so every integral against them reduces to one dimension.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import comb, eval_chebyt, eval_gegenbauer, roots_jacobi
from scipy.stats import ortho_group

from .errors import (
    EllZeroRejected,
    FullGroupRejected,
    OriginEvaluation,
    SphericalError,
    UnsupportedGroup,
)


def eigenspace_dimension(k: int, ell: int) -> int:
    """Dimension of the degree-ell spherical harmonics on S^{k-1}."""
    if ell == 0:
        return 1
    if k == 2:
        return 2
    return int(round((2 * ell + k - 2) / (ell + k - 2) * comb(ell + k - 2, ell, exact=True)))


def zonal_harmonic(k: int, ell: int, x):
    """Zonal harmonic of degree ell on S^{k-1} as a function of x = sigma . e_1.

    Normalized so its mean square over the sphere is one.
    """
    x = np.asarray(x, dtype=float)
    if ell == 0:
        return np.ones_like(x)
    if k == 2:
        return math.sqrt(2.0) * eval_chebyt(ell, x)
    alpha = (k - 2) / 2.0
    scale = math.sqrt(eigenspace_dimension(k, ell)) / eval_gegenbauer(ell, alpha, 1.0)
    return scale * eval_gegenbauer(ell, alpha, x)


@dataclass(frozen=True)
class SphericalEigenpair:
    """Eigenpair -Delta_sigma phi = mu phi on S^{k-1}, phi zonal about e_1."""

    k: int
    ell: int
    mu: float
    label: str

    def zonal(self, x):
        return zonal_harmonic(self.k, self.ell, x)

    def __call__(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape[-1] != self.k:
            raise SphericalError(f"points must have last axis {self.k}, got {sigma.shape}")
        norm = np.linalg.norm(sigma, axis=-1)
        if np.any(norm == 0):
            raise OriginEvaluation("eigenfunction evaluated at the origin")
        return self.zonal(sigma[..., 0] / norm)

    @property
    def multiplicity(self) -> int:
        return eigenspace_dimension(self.k, self.ell)


def eigenpair_degree(k: int, ell: int) -> SphericalEigenpair:
    if k < 2:
        raise SphericalError(f"k must be >= 2, got {k}")
    if ell == 0:
        raise EllZeroRejected("degree 0 is the constant eigenfunction (mu = 0)")
    if ell < 0:
        raise SphericalError(f"degree must be positive, got {ell}")
    return SphericalEigenpair(k=int(k), ell=int(ell), mu=float(ell * (ell + k - 2)),
                              label=f"degree-{ell}")


@lru_cache(maxsize=64)
def zonal_quadrature(k: int, order: int):
    """Nodes x and weights (summing to one) for averaging zonal functions on S^{k-1}.

    Gauss-Jacobi rule for the weight (1 - x^2)^{(k-3)/2}; exact for
    polynomials in x of degree < 2*order.
    """
    a = (k - 3) / 2.0
    x, w = roots_jacobi(order, a, a)
    w = w / w.sum()
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def sphere_quadrature(k: int, order: int):
    """Points on S^{k-1} and weights summing to one (tensor product rule).

    Built recursively: sigma = (x, sqrt(1 - x^2) sigma') with a Gauss-Jacobi
    rule in x and the rule for S^{k-2} in sigma'; the circle uses the
    trapezoid rule with ``2*order`` points.
    """
    if k == 2:
        th = 2 * np.pi * np.arange(2 * order) / (2 * order)
        pts = np.stack([np.cos(th), np.sin(th)], axis=-1)
        return pts, np.full(th.size, 1.0 / th.size)
    x, wx = zonal_quadrature(k, order)
    sub, wsub = sphere_quadrature(k - 1, order)
    rad = np.sqrt(1.0 - x ** 2)
    pts = np.concatenate(
        [np.repeat(x, sub.shape[0])[:, None],
         (rad[:, None, None] * sub[None, :, :]).reshape(-1, k - 1)], axis=1)
    return pts, np.outer(wx, wsub).ravel()


def laplace_beltrami_residual(pair: SphericalEigenpair, nodes: int = 200,
                              band: float = 0.1) -> float:
    """Relative sup-norm of (-Delta_sigma - mu) phi by centered differences.

    The zonal Laplacian is f'' + (k-2) cot(theta) f' in the polar angle;
    points within ``band`` of the poles are excluded from the norm.
    """
    th = np.linspace(0.0, np.pi, nodes + 1)
    h = th[1] - th[0]
    f = pair.zonal(np.cos(th))
    d2 = (f[2:] - 2 * f[1:-1] + f[:-2]) / h ** 2
    d1 = (f[2:] - f[:-2]) / (2 * h)
    ti = th[1:-1]
    lap = d2 + (pair.k - 2) * d1 * np.cos(ti) / np.sin(ti)
    res = -lap - pair.mu * f[1:-1]
    keep = (ti > band) & (ti < np.pi - band)
    return float(np.max(np.abs(res[keep])) / np.max(np.abs(pair.mu * f[1:-1][keep])))


@dataclass(frozen=True)
class SymmetryGroup:
    """Descriptor of the groups used by the symmetry-breaking argument.

    kind is one of ``trivial``, ``orthogonal`` (all of O(k)), ``cyclic``
    (rotations by 2 pi / t of the plane) and ``product`` (an inner group
    acting on each of m blocks, together with block permutations).
    """

    kind: str
    k: int
    t: Optional[int] = None
    m: int = 1
    inner: Optional["SymmetryGroup"] = field(default=None, compare=True)

    def __post_init__(self):
        if self.kind not in ("trivial", "orthogonal", "cyclic", "product"):
            raise UnsupportedGroup(f"unknown group kind {self.kind!r}")
        if self.kind == "cyclic" and (self.k != 2 or self.t is None or self.t < 2):
            raise SphericalError("cyclic sector groups need k = 2 and t >= 2")
        if self.kind == "product" and (self.inner is None or self.inner.k != self.k):
            raise SphericalError("product groups need an inner group on R^k")

    @classmethod
    def trivial(cls, k: int) -> "SymmetryGroup":
        return cls("trivial", k)

    @classmethod
    def orthogonal(cls, k: int) -> "SymmetryGroup":
        return cls("orthogonal", k)

    @classmethod
    def cyclic(cls, t: int) -> "SymmetryGroup":
        return cls("cyclic", 2, t=int(t))

    @classmethod
    def sector(cls, t: int) -> "SymmetryGroup":
        """Z_t on the plane, with t = 1 meaning the trivial group."""
        return cls.trivial(2) if t == 1 else cls.cyclic(t)

    @classmethod
    def product(cls, inner: "SymmetryGroup", m: int) -> "SymmetryGroup":
        return cls("product", inner.k, m=int(m), inner=inner)

    @property
    def dimension(self) -> int:
        return self.k * self.m

    @property
    def label(self) -> str:
        if self.kind == "cyclic":
            return f"Z_{self.t}"
        if self.kind == "product":
            return f"{self.inner.label}^{self.m}xP"
        return f"{self.kind}(k={self.k})"

    def element(self, rng: np.random.Generator) -> np.ndarray:
        """A random group element as an orthogonal matrix."""
        if self.kind == "trivial":
            return np.eye(self.k)
        if self.kind == "orthogonal":
            return ortho_group.rvs(self.k, random_state=rng) if self.k > 1 else np.eye(1)
        if self.kind == "cyclic":
            j = rng.integers(self.t)
            a = 2 * np.pi * j / self.t
            return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
        n = self.dimension
        mat = np.zeros((n, n))
        perm = rng.permutation(self.m)
        for j in range(self.m):
            h = perm[j]
            mat[h * self.k:(h + 1) * self.k, j * self.k:(j + 1) * self.k] = self.inner.element(rng)
        return mat

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "k": self.k, "m": self.m, "t": self.t}
        if self.inner is not None:
            out["inner"] = self.inner.to_dict()
        return out


def invariant_first_eigenvalue(group: SymmetryGroup, k: Optional[int] = None) -> SphericalEigenpair:
    """Smallest positive eigenvalue with a mean-zero group-invariant eigenfunction."""
    if group.kind == "product":
        return invariant_first_eigenvalue(group.inner, k)
    if k is not None and k != group.k:
        raise SphericalError(f"group acts on R^{group.k}, not R^{k}")
    if group.kind == "orthogonal":
        raise FullGroupRejected("O(k)-invariant mean-zero functions are zero")
    if group.kind == "trivial":
        return eigenpair_degree(group.k, 1)
    pair = eigenpair_degree(2, group.t)
    return SphericalEigenpair(k=2, ell=pair.ell, mu=pair.mu, label=group.label)


@dataclass(frozen=True)
class PerturbationFactor:
    """F(x, y) = sum_j f_j phi(x_j/|x_j|) with f_j = |x_j| / |(x, y)|."""

    pair: SphericalEigenpair
    k: int
    m: int

    @property
    def n(self) -> int:
        return self.k * self.m

    def _blocks(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise SphericalError(f"points must have last axis {self.n}, got {x.shape}")
        return x.reshape(x.shape[:-1] + (self.m, self.k))

    def parts(self, x, y=0.0):
        """Return (f, phi, rho, R): per-block radial factors, angular values,
        block radii |x_j| and the half-space radius |zeta|."""
        xb = self._blocks(x)
        y = np.asarray(y, dtype=float)
        rho = np.linalg.norm(xb, axis=-1)
        big_r = np.sqrt(np.sum(rho ** 2, axis=-1) + y ** 2)
        if np.any(big_r == 0):
            raise OriginEvaluation("perturbation factor is undefined at the origin")
        safe = np.where(rho > 0, rho, 1.0)
        phi = self.pair.zonal(xb[..., 0] / safe)
        phi = np.where(rho > 0, phi, 0.0)
        f = rho / big_r[..., None]
        return f, phi, rho, big_r

    def __call__(self, x, y=0.0):
        f, phi, _, _ = self.parts(x, y)
        return np.sum(f * phi, axis=-1)

    def g_closed(self, x, y, s: float):
        """g_j = |zeta|^{-3} |x_j|^{-1} ((n+1-2s)|x_j|^2 + (mu-k+1)|zeta|^2)."""
        _, phi, rho, big_r = self.parts(x, y)
        r2 = big_r[..., None] ** 2
        g = ((self.n + 1 - 2 * s) * rho ** 2 + (self.pair.mu - self.k + 1) * r2) / (
            big_r[..., None] ** 3 * rho)
        return g, phi


def perturbation_factor(pair: SphericalEigenpair, k: int, m: int = 1) -> PerturbationFactor:
    if pair.k != k:
        raise SphericalError(f"eigenpair lives on S^{pair.k - 1}, partition uses k = {k}")
    if pair.mu <= 0:
        raise EllZeroRejected("perturbation factor needs a positive eigenvalue")
    return PerturbationFactor(pair=pair, k=int(k), m=int(m))
