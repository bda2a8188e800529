"""Log-spaced radial grids, discretized fields, Fourier-Bessel transforms
and weighted quadrature.

A radial function u(r) on R^n is carried on a uniform grid in t = ln r.
The Fourier transform of u(r) Y_ell(sigma) is (-i)^ell Y_ell(xi/|xi|) times
the order nu = ell + (n-2)/2 Hankel transform

    u_hat(rho) = rho^{1-n/2} int_0^inf u(r) J_nu(rho r) r^{n/2} dr,

which is an involution. With G(t) = u(e^t) e^{nt/2} it becomes a
convolution in t, evaluated here by FFT on the grid (the FFTLog scheme).
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate
from scipy.optimize import brentq
from scipy.special import gamma as _gamma
from scipy.special import jv, loggamma, rgamma

from .constants import sphere_area
from .errors import ResolutionError, SingularIntegralError, SpectralError, TruncationError
from .spherical import zonal_harmonic, zonal_quadrature

DEFAULT_R_MIN = 1e-30
DEFAULT_R_MAX = 1e30
DEFAULT_NODES = 4096


def default_nodes() -> int:
    """Grid size, overridable through the CKN_GRID_NODES environment variable."""
    raw = os.environ.get("CKN_GRID_NODES")
    if raw is None:
        return DEFAULT_NODES
    try:
        val = int(raw)
    except ValueError as exc:
        raise SpectralError(f"CKN_GRID_NODES must be an integer, got {raw!r}") from exc
    if val < 16:
        raise SpectralError(f"CKN_GRID_NODES must be >= 16, got {val}")
    return val


@dataclass(frozen=True)
class RadialGrid:
    """Nodes r_i = exp(t0 + i dt), i = 0 .. size-1.

    Integrals int_0^inf h(r) dr are approximated by sum_i h(r_i) r_i dt, the
    trapezoid rule in t for integrands that vanish at both ends.
    """

    t0: float
    dt: float
    size: int

    def __post_init__(self):
        if not (self.dt > 0 and self.size >= 2 and math.isfinite(self.t0)):
            raise SpectralError(f"invalid grid t0={self.t0}, dt={self.dt}, size={self.size}")

    @classmethod
    def from_bounds(cls, r_min: float, r_max: float, nodes: int) -> "RadialGrid":
        if not 0 < r_min < r_max:
            raise SpectralError(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
        t0 = math.log(r_min)
        return cls(t0, (math.log(r_max) - t0) / (nodes - 1), int(nodes))

    @classmethod
    def symmetric(cls, half_range: float, nodes: int, center: float = 0.0) -> "RadialGrid":
        """Periodic-style grid t in [center - L, center + L) with ``nodes`` points."""
        return cls(center - half_range, 2.0 * half_range / nodes, int(nodes))

    @classmethod
    def default(cls) -> "RadialGrid":
        return cls.from_bounds(DEFAULT_R_MIN, DEFAULT_R_MAX, default_nodes())

    @cached_property
    def log_nodes(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.size)

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.exp(self.log_nodes)

    @property
    def weights(self) -> np.ndarray:
        return self.nodes * self.dt

    @property
    def r_min(self) -> float:
        return float(self.nodes[0])

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Angular frequencies tau conjugate to t, in numpy FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.size, self.dt)

    def reciprocal(self) -> "RadialGrid":
        """Momentum grid rho_i = 1 / r_{N-1-i}."""
        return RadialGrid(-(self.t0 + (self.size - 1) * self.dt), self.dt, self.size)

    def refined(self, factor: int = 2) -> "RadialGrid":
        return RadialGrid(self.t0, self.dt / factor, self.size * factor)

    def to_dict(self) -> dict:
        return {"t0": self.t0, "dt": self.dt, "size": self.size,
                "r_min": self.r_min, "r_max": self.r_max}


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Samples u(r_i) of a radial function on R^n."""

    grid: RadialGrid
    values: np.ndarray
    n: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.size,):
            raise SpectralError(f"values shape {vals.shape} does not match grid {self.grid.size}")
        if not np.all(np.isfinite(vals)):
            raise SpectralError("profile values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, func, grid: RadialGrid, n: int) -> "RadialProfile":
        return cls(grid, np.asarray(func(grid.nodes), dtype=float), int(n))

    @property
    def truncated(self) -> bool:
        peak = np.max(np.abs(self.values))
        return bool(abs(self.values[-1]) > 1e-10 * peak)

    def scaled(self, alpha: float = 1.0) -> "RadialProfile":
        return RadialProfile(self.grid, alpha * self.values, self.n)

    def log_values(self, s: float) -> np.ndarray:
        """g(t) = r^{(n-2s)/2} u(r), the variable in which the energies are diagonal."""
        return self.values * self.grid.nodes ** ((self.n - 2 * s) / 2.0)

    @classmethod
    def from_log_values(cls, grid: RadialGrid, g, n: int, s: float) -> "RadialProfile":
        return cls(grid, np.asarray(g) * grid.nodes ** (-(n - 2 * s) / 2.0), n)

    def interpolate(self, r) -> np.ndarray:
        """Linear interpolation in ln r; zero outside the grid."""
        t = np.log(np.asarray(r, dtype=float))
        return np.interp(t, self.grid.log_nodes, self.values, left=0.0, right=0.0)


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    """Fourier-Bessel data of one angular mode.

    ``weighted`` holds u_hat(rho_i) rho_i^{n/2}, the quantity the transform
    produces with uniform absolute accuracy; ``values`` divides the weight
    back out, which amplifies roundoff where rho^{n/2} is tiny.
    """

    grid: RadialGrid
    weighted: np.ndarray
    order: float
    n: int
    ell: int = 0

    @property
    def values(self) -> np.ndarray:
        return self.weighted * self.grid.nodes ** (-self.n / 2.0)

    def l2_norm_squared(self) -> float:
        """int |u_hat|^2 rho^{n-1} d rho (without the angular factor)."""
        return float(self.grid.dt * np.sum(self.weighted ** 2))


@dataclass(frozen=True, eq=False)
class PolarField:
    """Function sum_ell u_ell(r) Theta_ell(sigma) on R^n.

    For n = 2 the angular basis is 1, sqrt(2) cos(ell theta) and
    sqrt(2) sin(ell theta); ``coeffs`` holds the cosine parts and
    ``sin_coeffs`` the sine parts. For n >= 3 the basis is the normalized
    zonal harmonics and ``sin_coeffs`` is None. Every basis function has unit
    mean square over the sphere. ``n_angular`` is the number of angular
    collocation points used for nonlinear quantities.
    """

    grid: RadialGrid
    n: int
    modes: tuple
    coeffs: np.ndarray
    sin_coeffs: Optional[np.ndarray] = None
    n_angular: Optional[int] = None

    def __post_init__(self):
        modes = tuple(int(l) for l in self.modes)
        if len(set(modes)) != len(modes) or any(l < 0 for l in modes):
            raise SpectralError(f"invalid mode set {modes}")
        coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if coeffs.shape != (len(modes), self.grid.size):
            raise SpectralError(f"coeff shape {coeffs.shape} != ({len(modes)}, {self.grid.size})")
        sin = self.sin_coeffs
        if sin is not None:
            if self.n != 2:
                raise SpectralError("sine parts exist only for n = 2")
            sin = np.atleast_2d(np.asarray(sin, dtype=float))
            if sin.shape != coeffs.shape:
                raise SpectralError("sine coefficients must match cosine coefficients")
            if 0 in modes:
                sin = sin.copy()
                sin[modes.index(0)] = 0.0
        top = max(modes) if modes else 0
        na = self.n_angular
        if na is None:
            na = max(4 * top, 8) if self.n == 2 else max(2 * top + 8, 16)
        if self.n == 2 and na < 2 * top + 1:
            raise SpectralError(f"n_angular = {na} cannot resolve mode {top}")
        if not (np.all(np.isfinite(coeffs)) and (sin is None or np.all(np.isfinite(sin)))):
            raise SpectralError("field coefficients must be finite")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "sin_coeffs", sin)
        object.__setattr__(self, "n_angular", int(na))

    @classmethod
    def from_profile(cls, profile: RadialProfile, ell: int = 0,
                     n_angular: Optional[int] = None) -> "PolarField":
        return cls(profile.grid, profile.n, (ell,), profile.values[None, :], None, n_angular)

    @classmethod
    def from_modes(cls, grid, n, mode_values: dict, sin_values: Optional[dict] = None,
                   n_angular=None) -> "PolarField":
        modes = tuple(sorted(mode_values))
        coeffs = np.array([mode_values[l] for l in modes])
        sin = None
        if sin_values is not None:
            sin = np.array([sin_values.get(l, np.zeros(grid.size)) for l in modes])
        return cls(grid, n, modes, coeffs, sin, n_angular)

    @classmethod
    def from_samples(cls, grid: RadialGrid, samples, modes: Sequence[int]) -> "PolarField":
        """Project samples on the uniform theta grid (rows) onto trig modes (n = 2)."""
        samples = np.asarray(samples, dtype=float)
        na = samples.shape[0]
        spec = np.fft.rfft(samples, axis=0) / na
        modes = tuple(sorted(int(l) for l in modes))
        cos = np.empty((len(modes), grid.size))
        sin = np.empty_like(cos)
        for i, l in enumerate(modes):
            if l == 0:
                cos[i], sin[i] = spec[0].real, 0.0
            else:
                cos[i] = math.sqrt(2.0) * spec[l].real
                sin[i] = -math.sqrt(2.0) * spec[l].imag
        return cls(grid, 2, modes, cos, sin, na)

    @property
    def is_radial(self) -> bool:
        return self.modes == (0,)

    def mode_profile(self, ell: int, part: str = "cos") -> RadialProfile:
        i = self.modes.index(ell)
        if part == "cos":
            vals = self.coeffs[i]
        elif self.sin_coeffs is None:
            vals = np.zeros(self.grid.size)
        else:
            vals = self.sin_coeffs[i]
        return RadialProfile(self.grid, vals, self.n)

    def components(self):
        """Yield (ell, radial samples) for every nonzero angular component."""
        for i, l in enumerate(self.modes):
            yield l, self.coeffs[i]
            if self.sin_coeffs is not None and l > 0:
                yield l, self.sin_coeffs[i]

    def angular_rule(self):
        """Collocation weights (summing to one) and basis matrices.

        Returns ``(weights, cos_basis, sin_basis)`` where the basis matrices
        have shape (n_angular, len(modes)); ``sin_basis`` is None for n >= 3.
        """
        modes = np.array(self.modes)
        if self.n == 2:
            th = 2 * np.pi * np.arange(self.n_angular) / self.n_angular
            scale = np.where(modes == 0, 1.0, math.sqrt(2.0))
            cb = scale * np.cos(np.outer(th, modes))
            sb = scale * np.sin(np.outer(th, modes))
            return np.full(th.size, 1.0 / th.size), cb, sb
        x, w = zonal_quadrature(self.n, self.n_angular)
        cb = np.stack([zonal_harmonic(self.n, int(l), x) for l in modes], axis=1)
        return w, cb, None

    def node_values(self) -> np.ndarray:
        """Samples on (angular node, radial node), shape (n_angular, size)."""
        _, cb, sb = self.angular_rule()
        vals = cb @ self.coeffs
        if sb is not None and self.sin_coeffs is not None:
            vals = vals + sb @ self.sin_coeffs
        return vals

    def mode_energy_fractions(self, s: float) -> dict:
        """Share of the Hardy mass carried by each mode."""
        weight = self.grid.nodes ** (self.n - 2 * s)
        tot = {}
        for l, vals in self.components():
            tot[l] = tot.get(l, 0.0) + float(np.sum(weight * vals ** 2))
        total = sum(tot.values())
        return {l: (v / total if total > 0 else 0.0) for l, v in tot.items()}


Field = Union[RadialProfile, PolarField]


def as_polar(field: Field) -> PolarField:
    return field if isinstance(field, PolarField) else PolarField.from_profile(field)


# ---------------------------------------------------------------------------
# Hankel transform


@lru_cache(maxsize=32)
def _fftlog_kernel(size: int, dt: float, nu: float) -> np.ndarray:
    omega = 2 * np.pi * np.fft.fftfreq(size, dt)
    kern = np.exp(-1j * omega * math.log(2.0)
                  + loggamma((nu + 1 - 1j * omega) / 2) - loggamma((nu + 1 + 1j * omega) / 2))
    if size % 2 == 0:
        # the Nyquist bin must be real for a real transform
        kern[size // 2] = np.sign(kern[size // 2].real)
    kern.setflags(write=False)
    return kern


def fftlog(values, dt: float, nu: float, axis: int = -1) -> np.ndarray:
    """Discrete order-nu Hankel map on log grids.

    Maps samples G_i = u(r_i) r_i^{n/2} to u_hat(rho_i) rho_i^{n/2} on the
    reciprocal grid rho_i = 1/r_{N-1-i}; applying it twice is the identity.
    """
    vals = np.asarray(values, dtype=float)
    size = vals.shape[axis]
    kern = _fftlog_kernel(size, float(dt), float(nu))
    shape = [1] * vals.ndim
    shape[axis] = size
    rev = np.flip(vals, axis=axis)
    out = np.fft.ifft(np.fft.fft(rev, axis=axis) * kern.reshape(shape), axis=axis)
    return out.real


def _check_decay(arr, tol: float, what: str):
    peak = np.max(np.abs(arr))
    if peak == 0:
        return
    edge = max(abs(arr[0]), abs(arr[-1]))
    if edge > tol * peak:
        raise TruncationError(f"{what} has not decayed at the grid ends "
                              f"(edge/peak = {edge / peak:.3e} > {tol:.1e})")


def _check_resolution(arr, tol: float, what: str):
    spec = np.abs(np.fft.fft(arr))
    size = arr.size
    freq = np.abs(np.fft.fftfreq(size))
    peak = spec.max()
    if peak == 0:
        return
    high = spec[freq > 3.0 / 8.0].max(initial=0.0)
    if high > tol * peak:
        raise ResolutionError(f"{what} oscillates beyond the grid resolution "
                              f"(high-band/peak = {high / peak:.3e} > {tol:.1e})")


def hankel_order(n: int, ell: int) -> float:
    return ell + (n - 2) / 2.0


def hankel_transform(profile: RadialProfile, ell: int = 0, *, trunc_tol: float = 1e-8,
                     resolution_tol: float = 1e-8) -> SpectralProfile:
    """Order ell + (n-2)/2 Fourier-Bessel transform of a radial profile.

    Raises
    ------
    TruncationError
        if r^{n/2} u(r) is not negligible at either end of the grid.
    ResolutionError
        if r^{n/2} u(r) has content near the Nyquist frequency in ln r.
    """
    grid = profile.grid
    n = profile.n
    big_g = profile.values * grid.nodes ** (n / 2.0)
    if trunc_tol is not None:
        _check_decay(big_g, trunc_tol, "r^{n/2} u(r)")
    if resolution_tol is not None:
        _check_resolution(big_g, resolution_tol, "r^{n/2} u(r)")
    nu = hankel_order(n, ell)
    out = fftlog(big_g, grid.dt, nu)
    return SpectralProfile(grid.reciprocal(), out, nu, n, int(ell))


def inverse_hankel_weighted(spec: SpectralProfile) -> np.ndarray:
    """Samples u(r_i) r_i^{n/2} of the inverse transform."""
    return fftlog(spec.weighted, spec.grid.dt, spec.order)


def inverse_hankel(spec: SpectralProfile) -> RadialProfile:
    """Inverse of :func:`hankel_transform` (the transform is an involution).

    Absolute accuracy is uniform for u r^{n/2}, so values very close to the
    origin carry amplified roundoff.
    """
    rgrid = spec.grid.reciprocal()
    out = inverse_hankel_weighted(spec)
    return RadialProfile(rgrid, out * rgrid.nodes ** (-spec.n / 2.0), spec.n)


def hankel_quadrature(func, rho, n: int, ell: int = 0, r_cut: float = 50.0,
                      limit: int = 2000) -> np.ndarray:
    """Reference transform by adaptive quadrature against J_nu.

    Integrates rho^{1-n/2} int_0^{r_cut} u(r) J_nu(rho r) r^{n/2} dr; ``func``
    must be negligible beyond ``r_cut``.
    """
    nu = hankel_order(n, ell)
    out = []
    for p in np.atleast_1d(rho):
        val, _ = integrate.quad(lambda r: func(r) * jv(nu, p * r) * r ** (n / 2.0),
                                0.0, r_cut, limit=limit, epsabs=1e-14, epsrel=1e-12)
        out.append(p ** (1 - n / 2.0) * val)
    return np.array(out)


# ---------------------------------------------------------------------------
# quadrature


def _tail_residual(h: np.ndarray, dt: float) -> float:
    """Geometric-tail estimate of the mass beyond both grid ends."""
    total = 0.0
    for end, nxt in ((h[0], h[1]), (h[-1], h[-2])):
        if end == 0:
            continue
        ratio = end / nxt if nxt > 0 else math.inf
        if ratio >= 1:
            return math.inf
        total += end * (1 + ratio / (1 - ratio))
    return total * dt


def weighted_norm(field: Field, a: float, p: float, *, with_residual: bool = False,
                  trunc_tol: Optional[float] = 1e-6):
    """int_{R^n} |x|^{-a p} |u|^p dx.

    For a PolarField the angular average is taken on its collocation nodes
    before the radial quadrature. The returned residual estimates the mass
    outside the grid; ``TruncationError`` is raised when it exceeds
    ``trunc_tol`` times the value (pass None to only report it).
    """
    n = field.n
    if p < 1:
        raise SpectralError(f"power p must be >= 1, got {p}")
    if a * p >= n:
        raise SingularIntegralError(f"|x|^(-{a * p:g}) is not integrable at the origin in R^{n}")
    grid = field.grid
    if isinstance(field, PolarField):
        w, _, _ = field.angular_rule()
        ang = w @ np.abs(field.node_values()) ** p
    else:
        ang = np.abs(field.values) ** p
    h = sphere_area(n) * grid.nodes ** (n - a * p) * ang
    value = float(grid.dt * np.sum(h))
    resid = _tail_residual(h, grid.dt)
    if trunc_tol is not None and resid > trunc_tol * abs(value):
        raise TruncationError(f"weighted integral truncated: residual {resid:.3e}, value {value:.3e}")
    return (value, resid) if with_residual else value


def halfline_weight_integral(s: float, x: float, step: float = 0.1,
                             with_residual: bool = False):
    """int_0^inf y^{1-2s} / (x^2 + y^2) dy by the trapezoid rule in v = ln(y/|x|).

    The integrand in v is analytic in a strip, so the rule converges
    geometrically; ends are cut where it falls below 1e-18.
    """
    if not 0 < s < 1:
        raise SpectralError(f"s must lie in (0, 1), got {s}")
    ax = abs(float(x))
    if ax == 0:
        raise SingularIntegralError("x = 0 makes the half-line integral diverge")
    lo = -42.0 / (2 - 2 * s)
    hi = 42.0 / (2 * s)
    v = np.arange(lo, hi + step, step)
    h = np.exp((2 - 2 * s) * v) / (1 + np.exp(2 * v))
    val = step * np.sum(h) * ax ** (-2 * s)
    resid = step * (h[0] + h[-1]) * ax ** (-2 * s)
    return (float(val), float(resid)) if with_residual else float(val)


# ---------------------------------------------------------------------------
# Mellin symbol of the fractional Laplacian


def hardy_symbol(n: int, s: float, ell, tau) -> np.ndarray:
    """Multiplier Phi_ell(tau) of (-Delta)^s in the variable g = r^{(n-2s)/2} u.

    For the angular mode ell the quadratic form is
    int |(-Delta)^{s/2} u|^2 = |S^{n-1}| (1/2pi) int Phi_ell(tau) |g_hat(tau)|^2 dtau,
    with Phi_ell(tau) = 2^{2s} |Gamma(A + i tau/2)|^2 / |Gamma(B + i tau/2)|^2,
    A = (n + 2 ell + 2s)/4, B = (n + 2 ell - 2s)/4. Phi_0(0) is the Hardy constant.
    """
    ell = np.asarray(ell, dtype=float)
    tau = np.asarray(tau, dtype=float)
    a = (n + 2 * ell + 2 * s) / 4.0
    b = (n + 2 * ell - 2 * s) / 4.0
    return 2.0 ** (2 * s) * np.exp(2 * (loggamma(a + 0.5j * tau).real - loggamma(b + 0.5j * tau).real))


def symbol_imaginary(n: int, s: float, y, ell: int = 0):
    """Phi_ell continued to tau = i y (real for real y in (-2A, 2A))."""
    a = (n + 2 * ell + 2 * s) / 4.0
    b = (n + 2 * ell - 2 * s) / 4.0
    y = np.asarray(y, dtype=float)
    return (2.0 ** (2 * s) * _gamma(a - y / 2) * _gamma(a + y / 2)
            * rgamma(b - y / 2) * rgamma(b + y / 2))


def decay_rate(n: int, s: float, lam: float, ell: int = 0) -> float:
    """Exponential decay rate in |ln r| of solutions of the linearized equation.

    The smallest y > 0 with Phi_ell(i y) + lam = 0; a solution g(t) of
    the nonlinear problem decays like exp(-y |t|).
    """
    a = (n + 2 * ell + 2 * s) / 4.0
    top = 2 * a * (1 - 1e-14)
    f = lambda y: float(symbol_imaginary(n, s, y, ell)) + lam
    if f(0.0) <= 0:
        raise SpectralError(f"lambda = {lam} is at or below the Hardy threshold")
    return float(brentq(f, 0.0, top, xtol=1e-14, rtol=1e-14))


# ---------------------------------------------------------------------------
# profile I/O

PROFILE_FORMAT = "ckn-symbreak-profile"


def profile_to_json(profile: RadialProfile) -> dict:
    return {"format": PROFILE_FORMAT, "n": profile.n, "grid": profile.grid.to_dict(),
            "values": [float(v) for v in profile.values]}


def profile_from_json(data: dict) -> RadialProfile:
    if data.get("format") != PROFILE_FORMAT:
        raise SpectralError(f"not a profile container: format={data.get('format')!r}")
    g = data["grid"]
    grid = RadialGrid(float(g["t0"]), float(g["dt"]), int(g["size"]))
    return RadialProfile(grid, np.array(data["values"], dtype=float), int(data["n"]))


def save_profile(path, profile: RadialProfile) -> None:
    """Write a JSON container (``.json``) or two-column text (anything else)."""
    path = os.fspath(path)
    if path.endswith(".json"):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(profile_to_json(profile), fh, sort_keys=True)
        return
    arr = np.column_stack([profile.grid.nodes, profile.values])
    np.savetxt(path, arr, fmt="%.17e", header=f"n={profile.n}  columns: r value")


def load_profile(path, n: Optional[int] = None) -> RadialProfile:
    """Read a profile written by :func:`save_profile`.

    Text files must hold log-uniform radii; ``n`` overrides the header.
    """
    path = os.fspath(path)
    if path.endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            return profile_from_json(json.load(fh))
    header_n = None
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith("#") and "n=" in first:
        header_n = int(first.split("n=")[1].split()[0])
    dim = n if n is not None else header_n
    if dim is None:
        raise SpectralError("dimension n missing from profile header; pass n explicitly")
    arr = np.loadtxt(path, ndmin=2)
    t = np.log(arr[:, 0])
    dt = np.diff(t)
    if np.any(dt <= 0) or np.max(np.abs(dt - dt.mean())) > 1e-9 * max(1.0, abs(dt.mean())):
        raise SpectralError("radii in a profile file must be strictly increasing and log-uniform")
    grid = RadialGrid(float(t[0]), float((t[-1] - t[0]) / (t.size - 1)), int(t.size))
    return RadialProfile(grid, arr[:, 1], dim)
