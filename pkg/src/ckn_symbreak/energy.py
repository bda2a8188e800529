"""Energies of the weighted Hardy-Sobolev problem.

With g(t) = r^{(n-2s)/2} u(r), t = ln r, all three integrals are translation
invariant in t: the seminorm of an angular mode ell is a Fourier multiplier
Phi_ell (see :func:`ckn_symbreak.spectral.hardy_symbol`), the Hardy integral
is |S^{n-1}| int g^2 dt and the weighted L^q integral is |S^{n-1}| int |g|^q dt.
The discrete versions below use the FFT on the log grid, so they are exactly
consistent with each other (Parseval) and with the minimizers.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .constants import ProblemParams, sphere_area
from .errors import EnergyError, NegativeValues, ZeroFunction
from .spectral import (
    Field,
    PolarField,
    RadialGrid,
    RadialProfile,
    hankel_transform,
    hardy_symbol,
    weighted_norm,
)


NOISE_FLOOR = 1e-13


def _components(field: Field):
    if isinstance(field, RadialProfile):
        yield 0, field.values
    else:
        yield from field.components()


def _log_weight(field: Field, s: float) -> np.ndarray:
    return field.grid.nodes ** ((field.n - 2 * s) / 2.0)


def mode_quadratic_form(g: np.ndarray, grid: RadialGrid, n: int, s: float, ell: int,
                        shift: float = 0.0) -> float:
    """|S^{n-1}| dt sum_i g_i [(Phi_ell + shift) g]_i for log-variable samples g."""
    spec = np.fft.fft(g)
    mult = hardy_symbol(n, s, ell, grid.frequencies) + shift
    return float(sphere_area(n) * grid.dt / g.size * np.sum(mult * np.abs(spec) ** 2))


def seminorm(field: Field, s: float, method: str = "mellin") -> float:
    """||(-Delta)^{s/2} u||_2^2, summed over angular components.

    ``method="mellin"`` applies the multiplier in the log variable,
    ``method="hankel"`` integrates rho^{2s} |u_hat|^2 against the order
    ell + (n-2)/2 Fourier-Bessel transform of each component.
    """
    n = field.n
    total = 0.0
    if method == "mellin":
        w = _log_weight(field, s)
        for ell, vals in _components(field):
            total += mode_quadratic_form(vals * w, field.grid, n, s, ell)
    elif method == "hankel":
        for ell, vals in _components(field):
            spec = hankel_transform(RadialProfile(field.grid, vals, n), ell)
            rho = spec.grid.nodes
            wt = spec.weighted
            # drop the transform's roundoff floor, which rho^{2s} would amplify
            wt = np.where(np.abs(wt) >= NOISE_FLOOR * np.max(np.abs(wt)), wt, 0.0)
            total += sphere_area(n) * spec.grid.dt * float(np.sum(rho ** (2 * s) * wt ** 2))
    else:
        raise EnergyError(f"unknown seminorm method {method!r}")
    return total


def hardy_integral(field: Field, s: float, with_residual: bool = False):
    """int |x|^{-2s} |u|^2 dx."""
    return weighted_norm(field, s, 2.0, with_residual=with_residual, trunc_tol=None)


def lq_integral(field: Field, b: float, q: float, with_residual: bool = False):
    """int |x|^{-bq} |u|^q dx."""
    return weighted_norm(field, b, q, with_residual=with_residual, trunc_tol=None)


@dataclass(frozen=True)
class EnergyReport:
    seminorm: float
    hardy: float
    lq: float
    q_lambda: float
    j_lambda: float
    lam: float
    q: float
    b: float
    n: int
    s: float
    hardy_residual: float
    lq_residual: float
    grid: dict

    def to_dict(self) -> dict:
        return asdict(self)


def energy_report(field: Field, params: ProblemParams) -> EnergyReport:
    semi = seminorm(field, params.s)
    hardy, h_res = hardy_integral(field, params.s, with_residual=True)
    lq, l_res = lq_integral(field, params.b, params.q, with_residual=True)
    if lq == 0:
        raise ZeroFunction("the weighted L^q norm vanishes")
    q_lam = semi + params.lam * hardy
    return EnergyReport(
        seminorm=semi, hardy=hardy, lq=lq, q_lambda=q_lam,
        j_lambda=q_lam / lq ** (2.0 / params.q), lam=params.lam, q=params.q, b=params.b,
        n=params.n, s=params.s, hardy_residual=h_res, lq_residual=l_res,
        grid=field.grid.to_dict(),
    )


def quotient(field: Field, s: float, lam: float, q: float, b: float) -> float:
    """J = (seminorm + lam * Hardy) / ||x|^{-b} u||_q^2 for raw exponents.

    No admissibility check, so the endpoint q = 2n/(n-2s), b = 0 is allowed.
    """
    num = seminorm(field, s) + lam * hardy_integral(field, s)
    den = lq_integral(field, b, q)
    if den == 0:
        raise ZeroFunction("the weighted L^q norm vanishes")
    return num / den ** (2.0 / q)


def _check_sign(field: Field, tol: float = 1e-12):
    vals = field.values if isinstance(field, RadialProfile) else field.node_values()
    peak = np.max(np.abs(vals))
    if peak == 0:
        raise ZeroFunction("field is identically zero")
    if np.min(vals) < -tol * peak:
        raise NegativeValues(f"field changes sign (min/max = {np.min(vals) / peak:.3e})")


def _el_terms(field: Field, params: ProblemParams, project: bool):
    """Linear part L g = (Phi + lam) g and nonlinearity N = |g|^{q-2} g in the
    log variable, both as arrays whose plain sum of squares times the
    weights gives the discrete L^2 norm."""
    n, s, q = field.n, params.s, params.q
    grid = field.grid
    w = _log_weight(field, s)
    if isinstance(field, RadialProfile):
        g = field.values * w
        lin = np.fft.ifft((hardy_symbol(n, s, 0, grid.frequencies) + params.lam) * np.fft.fft(g)).real
        return lin, np.abs(g) ** (q - 2) * g, np.ones(1)
    aw, cb, sb = field.angular_rule()
    mult = {ell: hardy_symbol(n, s, ell, grid.frequencies) + params.lam for ell in field.modes}

    def apply(rows):
        return np.array([np.fft.ifft(mult[l] * np.fft.fft(r)).real
                         for l, r in zip(field.modes, rows)])

    gc = field.coeffs * w
    lin_c = apply(gc)
    gs = lin_s = None
    if field.sin_coeffs is not None:
        gs = field.sin_coeffs * w
        lin_s = apply(gs)
    nodes_g = cb @ gc + (sb @ gs if gs is not None else 0.0)
    nonlin = np.abs(nodes_g) ** (q - 2) * nodes_g
    if project:
        nc = cb.T @ (aw[:, None] * nonlin)
        lin, non = [lin_c], [nc]
        if gs is not None:
            keep = np.array(field.modes) != 0
            lin.append(lin_s[keep])
            non.append((sb.T @ (aw[:, None] * nonlin))[keep])
        return np.concatenate(lin), np.concatenate(non), np.ones(1)
    lin_nodes = cb @ lin_c + (sb @ lin_s if lin_s is not None else 0.0)
    return lin_nodes, nonlin, aw[:, None]


def fit_multiplier(field: Field, params: ProblemParams, project: bool = True) -> float:
    """Least-squares Lagrange multiplier kappa in L g = kappa N(g)."""
    lin, non, wts = _el_terms(field, params, project)
    return float(np.sum(wts * lin * non) / np.sum(wts * non * non))


def el_residual(field: Field, params: ProblemParams, multiplier: Optional[float] = None,
                project: bool = True, return_multiplier: bool = False):
    """Relative residual of D^s u + lam |x|^{-2s} u = kappa |x|^{-bq} u^{q-1}.

    Multiplying the equation by r^{(n+2s)/2} turns it into
    (Phi + lam) g = kappa |g|^{q-2} g in t = ln r. The proxy returned is
    ||(Phi + lam) g - kappa |g|^{q-2} g|| / ||(Phi + lam) g|| in discrete
    L^2(dt dsigma). For a PolarField, ``project`` restricts the nonlinear
    term to the field's own mode set (the Galerkin residual).
    """
    _check_sign(field)
    lin, non, wts = _el_terms(field, params, project)
    kappa = float(np.sum(wts * lin * non) / np.sum(wts * non * non)) if multiplier is None else multiplier
    res = np.sqrt(np.sum(wts * (lin - kappa * non) ** 2) / np.sum(wts * lin ** 2))
    return (float(res), kappa) if return_multiplier else float(res)


def _refine_log(g: np.ndarray, factor: int) -> np.ndarray:
    """Trigonometric interpolation of periodic samples onto a grid ``factor`` times finer."""
    size = g.size
    spec = np.fft.fft(g)
    big = np.zeros(size * factor, dtype=complex)
    half = size // 2
    big[:half] = spec[:half]
    big[-half:] = spec[-half:]
    if size % 2 == 0:
        big[half] = 0.5 * spec[half]
        big[-half] = 0.5 * spec[half]
    return np.fft.ifft(big).real * factor


def refine_field(field: Field, s: float, factor: int = 2) -> Field:
    """Spectrally interpolate a field onto a grid ``factor`` times finer in
    ln r and, for PolarFields, with ``factor`` times more angular nodes."""
    grid = field.grid
    fine = grid.refined(factor)
    w_fine = fine.nodes ** (-(field.n - 2 * s) / 2.0)
    w = _log_weight(field, s)
    if isinstance(field, RadialProfile):
        return RadialProfile(fine, _refine_log(field.values * w, factor) * w_fine, field.n)
    cos = np.array([_refine_log(r * w, factor) * w_fine for r in field.coeffs])
    sin = None
    if field.sin_coeffs is not None:
        sin = np.array([_refine_log(r * w, factor) * w_fine for r in field.sin_coeffs])
    return PolarField(fine, field.n, field.modes, cos, sin, field.n_angular * factor)


def discretization_error(field: Field, params: ProblemParams, factor: int = 2) -> float:
    """|J(refined field) - J(field)|, an a-posteriori estimate of the
    quadrature error in J_lambda."""
    coarse = energy_report(field, params).j_lambda
    fine = energy_report(refine_field(field, params.s, factor), params).j_lambda
    return abs(fine - coarse)
