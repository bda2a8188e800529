"""Caffarelli-Silvestre extensions and their weighted energies.

The extension of a mode u(r) Theta_ell(sigma) is w(r, y) Theta_ell(sigma) with
w_hat(rho, y) = u_hat(rho) psi_s(rho y), psi_s(t) = 2^{1-s}/Gamma(s) t^s K_s(t).
Value-grid realizations are synthesized by the inverse Fourier-Bessel map on a
log-spaced height grid; every height integral is the trapezoid rule in
eta = ln y and every radial integral the trapezoid rule in t = ln r. Arrays
named with a capital letter carry the factor r^{n/2}, in which the transform
has uniform absolute accuracy.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import kve

from .constants import cs_constant, sphere_area
from .errors import (
    ExtensionError,
    GridResolutionError,
    NonRadialSource,
    PartitionMismatch,
    YTruncationError,
)
from .spectral import (
    PolarField,
    RadialProfile,
    SpectralProfile,
    fftlog,
    hankel_transform,
)
from .spherical import PerturbationFactor, SphericalEigenpair, perturbation_factor


def extension_multiplier(s: float, t) -> np.ndarray:
    """psi_s(t) = 2^{1-s} Gamma(s)^{-1} t^s K_s(t), with psi_s(0) = 1."""
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    pos = t > 0
    out[pos] = 0.0
    # beyond t = 700 the factor exp(-t) underflows
    mid = pos & (t < 700.0)
    tp = t[mid]
    out[mid] = 2.0 ** (1 - s) / _gamma(s) * tp ** s * kve(s, tp) * np.exp(-tp)
    return out


def extension_multiplier_minus_one(s: float, t) -> np.ndarray:
    """psi_s(t) - 1 without cancellation for small t.

    Below t = 1 the ascending series
    Gamma(1-s) [sum_{k>=1} (t/2)^{2k} / (k! Gamma(k+1-s))
                - (t/2)^{2s} sum_{k>=0} (t/2)^{2k} / (k! Gamma(k+1+s))]
    is summed; it follows from K_s = pi/(2 sin pi s) (I_{-s} - I_s).
    """
    t = np.asarray(t, dtype=float)
    out = extension_multiplier(s, t) - 1.0
    small = (t > 0) & (t < 1.0)
    if np.any(small):
        z = (t[small] / 2.0) ** 2
        lead = np.zeros_like(z)
        tail = np.zeros_like(z)
        zk = np.ones_like(z)
        fact = 1.0
        for k in range(0, 18):
            if k >= 1:
                lead += zk / (fact * _gamma(k + 1 - s))
            tail += zk / (fact * _gamma(k + 1 + s))
            zk = zk * z
            fact *= k + 1
        out[small] = _gamma(1 - s) * (lead - z ** s * tail)
    return out


def extension_multiplier_derivative(s: float, t) -> np.ndarray:
    """psi_s'(t) = -2^{1-s} Gamma(s)^{-1} t^s K_{1-s}(t) for t > 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ExtensionError("psi_s' is evaluated only for t > 0")
    out = np.zeros_like(t)
    mid = t < 700.0
    tp = t[mid]
    out[mid] = -(2.0 ** (1 - s)) / _gamma(s) * tp ** s * kve(1 - s, tp) * np.exp(-tp)
    return out


def bessel_energy_integral(s: float, step: float = 0.02, with_residual: bool = False):
    """I_s = int_0^inf t^{1-2s} (psi_s'(t)^2 + psi_s(t)^2) dt in the variable ln t."""
    rate = min(2 * s, 2 - 2 * s)
    v = np.arange(-40.0 / rate, math.log(60.0), step)
    t = np.exp(v)
    h = t ** (2 - 2 * s) * (extension_multiplier_derivative(s, t) ** 2 + extension_multiplier(s, t) ** 2)
    val = float(step * np.sum(h))
    resid = float(step * (h[0] / (1 - math.exp(-rate * step)) + h[-1]))
    return (val, resid) if with_residual else val


@dataclass(frozen=True)
class HeightGrid:
    """Log-uniform heights y_j = exp(eta_j), trapezoid weights in eta."""

    y_min: float = 1e-24
    y_max: float = 1e8
    nodes: int = 512

    @property
    def heights(self) -> np.ndarray:
        return np.exp(np.linspace(math.log(self.y_min), math.log(self.y_max), self.nodes))

    @property
    def d_eta(self) -> float:
        return (math.log(self.y_max) - math.log(self.y_min)) / (self.nodes - 1)

    def coarsened(self) -> "HeightGrid":
        """Same range with about half as many nodes."""
        return HeightGrid(self.y_min, self.y_max, (self.nodes + 1) // 2)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class ExtensionField:
    """Canonical extension of one angular mode of a source field."""

    source: RadialProfile
    s: float
    ell: int
    spectral: SpectralProfile

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def grid(self):
        return self.source.grid

    @property
    def mu(self) -> float:
        return self.ell * (self.ell + self.n - 2)

    def spectral_at(self, y) -> np.ndarray:
        """w_hat(rho_i, y_j) rho_i^{n/2}, shape (len(y), size)."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        rho = self.spectral.grid.nodes
        return self.spectral.weighted[None, :] * extension_multiplier(self.s, np.outer(y, rho))

    @property
    def trace_weighted(self) -> np.ndarray:
        """u(r_i) r_i^{n/2} from the exact source samples."""
        return self.source.values * self.grid.nodes ** (self.n / 2.0)

    def _difference(self, y: np.ndarray) -> np.ndarray:
        # w - u is transformed on its own so that its roundoff scales with
        # its size, which is O(y^{2s}) for small heights
        rho = self.spectral.grid.nodes
        live = self.spectral.weighted != 0
        spec = np.zeros((y.size, rho.size))
        spec[:, live] = self.spectral.weighted[live] * extension_multiplier_minus_one(
            self.s, np.outer(y, rho[live]))
        diff = fftlog(spec, self.spectral.grid.dt, self.spectral.order, axis=1)
        if self.ell > 0:
            # the mode vanishes like r^{ell} at the origin; remove the
            # roundoff floor there before it is divided by r
            diff = np.array([_clean_left(row) for row in diff])
        return diff

    def weighted_values(self, y) -> np.ndarray:
        """w(r_i, y_j) r_i^{n/2}, shape (len(y), size)."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return self.trace_weighted[None, :] + self._difference(y)

    def values(self, y) -> np.ndarray:
        return self.weighted_values(y) * self.grid.nodes ** (-self.n / 2.0)

    def weighted_gradient(self, y):
        """(W, W_r, W_y): w, dw/dr and dw/dy at (y_j, r_i), each times r^{n/2}."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(y <= 0):
            raise ExtensionError("gradients are evaluated only for y > 0")
        rho = self.spectral.grid.nodes
        dt = self.spectral.grid.dt
        nu = self.spectral.order
        live = self.spectral.weighted != 0
        arg = np.outer(y, rho[live])
        base = self.spectral.weighted[live]
        spec_w = np.zeros((y.size, rho.size))
        spec_w[:, live] = base * rho[live] * extension_multiplier(self.s, arg)
        spec_wy = np.zeros_like(spec_w)
        spec_wy[:, live] = base * rho[live] * extension_multiplier_derivative(self.s, arg)
        big_w = self.trace_weighted[None, :] + self._difference(y)
        big_wy = fftlog(spec_wy, dt, nu, axis=1)
        shifted = fftlog(spec_w, dt, nu + 1, axis=1)
        big_wr = self.ell / self.grid.nodes * big_w - shifted
        return big_w, big_wr, big_wy


NOISE_FLOOR = 1e-13


def clean_spectrum(weighted: np.ndarray, floor: float = NOISE_FLOOR) -> np.ndarray:
    """Zero both tails of a transform from where it first drops below
    ``floor`` times its peak; the roundoff floor beyond that point would be
    amplified by the powers of rho in gradients and energies."""
    mag = np.abs(weighted)
    peak = int(np.argmax(mag))
    small = mag < floor * mag[peak]
    out = weighted.copy()
    right = np.nonzero(small[peak:])[0]
    if right.size:
        out[peak + right[0]:] = 0.0
    left = np.nonzero(small[:peak + 1][::-1])[0]
    if left.size:
        out[:peak - left[0] + 1] = 0.0
    return out


def _clean_left(row: np.ndarray, floor: float = NOISE_FLOOR) -> np.ndarray:
    mag = np.abs(row)
    peak = int(np.argmax(mag))
    small = np.nonzero(mag[:peak + 1][::-1] < floor * mag[peak])[0]
    if small.size:
        row = row.copy()
        row[:peak - small[0] + 1] = 0.0
    return row


def cs_extend(field, s: float, ell: Optional[int] = None) -> ExtensionField:
    """Canonical extension of a radial profile or of one mode of a PolarField.

    The stored spectrum is cut at its roundoff floor (see :func:`clean_spectrum`),
    so the trace is exact up to that floor.
    """
    if not 0 < s < 1:
        raise ExtensionError(f"s must lie in (0, 1), got {s}")
    if isinstance(field, PolarField):
        if ell is None:
            if len(field.modes) != 1 or field.sin_coeffs is not None and np.any(field.sin_coeffs):
                raise ExtensionError("extend PolarFields one cosine mode at a time")
            ell = field.modes[0]
        profile = field.mode_profile(ell)
    else:
        profile = field
        ell = 0 if ell is None else ell
    spec = hankel_transform(profile, ell)
    spec = SpectralProfile(spec.grid, clean_spectrum(spec.weighted), spec.order, spec.n, spec.ell)
    return ExtensionField(profile, float(s), int(ell), spec)


def _slices(ext: ExtensionField, heights: np.ndarray, chunk: int = 64) -> Iterator:
    for start in range(0, heights.size, chunk):
        y = heights[start:start + chunk]
        yield y, ext.weighted_gradient(y)


def _edge_check(per_height: np.ndarray, total: float, tol: Optional[float], what: str) -> float:
    resid = float(abs(per_height[0]) + abs(per_height[-1]))
    if tol is not None and resid > tol * abs(total):
        raise YTruncationError(f"{what}: height tail {resid:.3e} exceeds {tol:.1e} of {total:.3e}")
    return resid


def dirichlet_energy(ext: ExtensionField, heights: Optional[HeightGrid] = None,
                     with_residual: bool = False, tail_tol: Optional[float] = 1e-8):
    """int int y^{1-2s} |grad w|^2 dx dy by quadrature on the value grid."""
    hg = heights or HeightGrid()
    ys = hg.heights
    r = ext.grid.nodes
    per = np.empty(ys.size)
    pos = 0
    for y, (w, wr, wy) in _slices(ext, ys):
        dens = wr ** 2 + wy ** 2 + ext.mu * (w / r) ** 2
        per[pos:pos + y.size] = y ** (2 - 2 * ext.s) * ext.grid.dt * dens.sum(axis=1)
        pos += y.size
    per *= sphere_area(ext.n)
    val = float(hg.d_eta * per.sum())
    resid = _edge_check(per, val / hg.d_eta, tail_tol, "Dirichlet energy") * hg.d_eta
    return (val, resid) if with_residual else val


def dirichlet_energy_factorized(ext: ExtensionField) -> float:
    """I_s int rho^{2s} |u_hat|^2 d rho-measure: the energy per momentum."""
    rho = ext.spectral.grid.nodes
    wt = ext.spectral.weighted
    semi = sphere_area(ext.n) * ext.spectral.grid.dt * float(np.sum(rho ** (2 * ext.s) * wt ** 2))
    return bessel_energy_integral(ext.s) * semi


@dataclass(frozen=True)
class SliceCheck:
    y: float
    lhs: float
    rhs: float
    c_hat: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-6)

    def to_dict(self) -> dict:
        return dict(asdict(self), holds=self.holds)


def slice_hardy_check(ext: ExtensionField, y: float, c_hat: float = 1.0) -> SliceCheck:
    """lhs = int |w(x,y)|^2/(|x|^2+y^2) dx and rhs = c_hat int |u|^2/(|x|^2+y^2) dx."""
    if not y > 0:
        raise ExtensionError("slice checks need y > 0")
    r = ext.grid.nodes
    big_w = ext.weighted_values([y])[0]
    big_u = ext.source.values * r ** (ext.n / 2.0)
    den = r ** 2 + y ** 2
    area = sphere_area(ext.n) * ext.grid.dt
    return SliceCheck(float(y), float(area * np.sum(big_w ** 2 / den)),
                      float(c_hat * area * np.sum(big_u ** 2 / den)), float(c_hat))


def halfplane_hardy(ext: ExtensionField, heights: Optional[HeightGrid] = None,
                    with_residual: bool = False, tail_tol: Optional[float] = 1e-8):
    """int int y^{1-2s} |w|^2 / (|x|^2 + y^2) dx dy."""
    hg = heights or HeightGrid()
    ys = hg.heights
    r = ext.grid.nodes
    per = np.empty(ys.size)
    for start in range(0, ys.size, 64):
        y = ys[start:start + 64]
        big_w = ext.weighted_values(y)
        per[start:start + y.size] = (y ** (2 - 2 * ext.s) * ext.grid.dt
                                     * np.sum(big_w ** 2 / (r[None, :] ** 2 + y[:, None] ** 2), axis=1))
    per *= sphere_area(ext.n)
    val = float(hg.d_eta * per.sum())
    resid = _edge_check(per, val / hg.d_eta, tail_tol, "half-space Hardy integral") * hg.d_eta
    return (val, resid) if with_residual else val


def boundary_term(ext: ExtensionField, y) -> np.ndarray:
    """y^{1-2s} int F d_yF |w|^2 dx for the m = 1 factor of a radial source.

    The angular average of F d_yF is d_y(|x|^2/|zeta|^2)/2 = -r^2 y / |zeta|^4.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    r = ext.grid.nodes
    big_w = ext.weighted_values(y)
    big_r2 = r[None, :] ** 2 + y[:, None] ** 2
    dens = big_w ** 2 * (-(r[None, :] ** 2) * y[:, None] / big_r2 ** 2)
    return sphere_area(ext.n) * y ** (1 - 2 * ext.s) * ext.grid.dt * dens.sum(axis=1)


@dataclass(frozen=True)
class ExtensionEnergyReport:
    dirichlet: float
    halfplane_hardy: float
    slice_checks: tuple
    seminorm: float
    cs: float
    hardy_source: float
    dirichlet_residual: float
    hardy_residual: float
    heights: dict

    @property
    def quad_d_ratio(self) -> float:
        return self.cs * self.dirichlet / self.seminorm

    def to_dict(self) -> dict:
        out = asdict(self)
        out["slice_checks"] = [c.to_dict() for c in self.slice_checks]
        out["quad_d_ratio"] = self.quad_d_ratio
        return out


def extension_report(ext: ExtensionField, ys: Sequence[float] = (0.1, 1.0, 10.0),
                     c_hat: float = 1.0, heights: Optional[HeightGrid] = None) -> ExtensionEnergyReport:
    from .energy import hardy_integral, seminorm

    hg = heights or HeightGrid()
    d, d_res = dirichlet_energy(ext, hg, with_residual=True)
    h, h_res = halfplane_hardy(ext, hg, with_residual=True)
    src = PolarField.from_profile(ext.source, ext.ell)
    return ExtensionEnergyReport(
        dirichlet=d, halfplane_hardy=h,
        slice_checks=tuple(slice_hardy_check(ext, y, c_hat) for y in ys),
        seminorm=seminorm(src, ext.s), cs=cs_constant(ext.s),
        hardy_source=hardy_integral(src, ext.s),
        dirichlet_residual=d_res, hardy_residual=h_res, heights=hg.to_dict(),
    )


@dataclass(frozen=True)
class GapResult:
    """Energy gap of the extension F w against its bound.

    gap = int int y^{1-2s} (|grad(F w)|^2 - |grad w|^2), bound = coefficient *
    halfplane, with coefficient = m mu + m + 1 - 2s. ``ibp_direct`` and
    ``ibp_closed`` are the integrated-by-parts majorant computed before and
    after moving the derivative onto F; their agreement checks that no
    boundary terms survive. ``error`` is the change of the gap when the
    height grid is coarsened by two.
    """

    gap: float
    bound: float
    coefficient: float
    halfplane: float
    ibp_direct: float
    ibp_closed: float
    f_weighted: float
    dirichlet: float
    error: float
    mu: float
    m: int

    @property
    def margin(self) -> float:
        return self.bound - self.gap

    @property
    def holds(self) -> bool:
        return self.gap <= self.bound

    def to_dict(self) -> dict:
        return dict(asdict(self), margin=self.margin, holds=self.holds)


def _gap_sums(ext: ExtensionField, ys: np.ndarray, mu: float, m: int, k: int):
    s = ext.s
    n = ext.n
    r = ext.grid.nodes[None, :]
    acc = np.zeros(6)
    origin = 0.0
    for y, (w, wr, wy) in _slices(ext, ys):
        yc = y[:, None]
        r2 = r ** 2 + yc ** 2
        grad2 = wr ** 2 + wy ** 2
        ratio = r ** 2 / r2
        ang = w ** 2 * (m * (1 + mu) / r2 - r ** 2 / r2 ** 2)
        cross = w * (2 * r * yc ** 2 * wr - 2 * r ** 2 * yc * wy) / r2 ** 2
        gap = ang + cross + (ratio - 1) * grad2
        closed = w ** 2 * ((n + 1 - 2 * s) * r ** 2 + m * (mu - k + 1) * r2) / r2 ** 2
        wy_pow = y ** (2 - 2 * s)
        parts = (gap, ang + cross, closed, w ** 2 / r2, ratio * grad2, grad2)
        for i, p in enumerate(parts):
            acc[i] += np.sum(wy_pow * p.sum(axis=1))
        origin = max(origin, float(np.max(np.abs(wy_pow[:, None] * gap[:, :8]))))
    return acc, origin


def perturbed_extension_gap(ext: ExtensionField, pair: SphericalEigenpair, m: int = 1,
                            heights: Optional[HeightGrid] = None,
                            origin_tol: float = 1e-10) -> GapResult:
    """Gap of the perturbed extension, averaged over the block spheres.

    For a source radial in every block, the sphere averages of F^2, F grad F
    and |grad F|^2 depend on (|x|, y) only, which reduces the 2n+1
    dimensional integral to the (r, y) quarter plane.
    """
    if ext.ell != 0:
        raise NonRadialSource("the perturbed extension needs a radial source")
    if pair.mu <= 0:
        raise ExtensionError("the eigenvalue must be positive")
    if pair.k * m != ext.n:
        raise PartitionMismatch(f"n = {ext.n} is not k*m = {pair.k}*{m}")
    hg = heights or HeightGrid()
    scale = sphere_area(ext.n) * ext.grid.dt * hg.d_eta
    acc, origin = _gap_sums(ext, hg.heights, pair.mu, m, pair.k)
    acc = acc * scale
    if origin * scale > origin_tol * max(abs(acc[0]), abs(acc[3])):
        raise GridResolutionError("gap integrand has not decayed at the smallest radii")
    coarse = hg.coarsened()
    acc_c, _ = _gap_sums(ext, coarse.heights, pair.mu, m, pair.k)
    acc_c = acc_c * sphere_area(ext.n) * ext.grid.dt * coarse.d_eta
    coef = m * pair.mu + m + 1 - 2 * ext.s
    return GapResult(
        gap=float(acc[0]), bound=float(coef * acc[3]), coefficient=float(coef),
        halfplane=float(acc[3]), ibp_direct=float(acc[1]), ibp_closed=float(acc[2]),
        f_weighted=float(acc[4]), dirichlet=float(acc[5]),
        error=float(abs(acc[0] - acc_c[0])), mu=float(pair.mu), m=int(m),
    )


# ---------------------------------------------------------------------------
# pointwise algebra of the factor F


def divergence_fd(factor: PerturbationFactor, s: float, x, y, step: float = 1e-4) -> np.ndarray:
    """-div(y^{1-2s} grad F) by conservative second differences."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    f0 = factor(x, y)
    lap = np.zeros_like(f0)
    for i in range(x.shape[1]):
        e = np.zeros(x.shape[1])
        e[i] = step
        lap += factor(x + e, y) - 2 * f0 + factor(x - e, y)
    flux = ((y + step / 2) ** (1 - 2 * s) * (factor(x, y + step) - f0)
            - (y - step / 2) ** (1 - 2 * s) * (f0 - factor(x, y - step)))
    return -(y ** (1 - 2 * s) * lap + flux) / step ** 2


def divergence_closed(factor: PerturbationFactor, s: float, x, y):
    """y^{1-2s} sum_j g_j phi_j and the scale y^{1-2s} sum_j |g_j phi_j|."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    g, phi = factor.g_closed(x, y, s)
    w = y ** (1 - 2 * s)
    return w * np.sum(g * phi, axis=-1), w * np.sum(np.abs(g * phi), axis=-1)


@dataclass(frozen=True)
class AlgebraCheck:
    k: int
    m: int
    s: float
    points: int
    step: float
    max_rel_error: float
    errors: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {"k": self.k, "m": self.m, "s": self.s, "points": self.points,
                "step": self.step, "max_rel_error": self.max_rel_error}


def g_algebra_check(pair: SphericalEigenpair, m: int, s: float, points: int = 100,
                    step: float = 1e-4, seed: int = 0) -> AlgebraCheck:
    """Compare the finite-difference divergence with the closed form at random
    points with block radii in [0.3, 2] and heights in [0.2, 2]."""
    rng = np.random.default_rng(seed)
    k = pair.k
    factor = perturbation_factor(pair, k, m)
    dirs = rng.standard_normal((points, m, k))
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    radii = rng.uniform(0.3, 2.0, (points, m, 1))
    x = (dirs * radii).reshape(points, k * m)
    y = rng.uniform(0.2, 2.0, points)
    fd = divergence_fd(factor, s, x, y, step)
    closed, scale = divergence_closed(factor, s, x, y)
    err = np.abs(fd - closed) / scale
    return AlgebraCheck(k, m, float(s), points, step, float(err.max()), err)
