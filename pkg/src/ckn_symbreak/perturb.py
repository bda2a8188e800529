"""The perturbation u -> u F of a block-radial function, its energy gap and
second-variation certificates."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import roots_jacobi

from .constants import (
    ProblemParams,
    breaking_threshold,
    c_mu,
    cs_constant,
    hardy_constant,
)
from .energy import el_residual, hardy_integral, lq_integral, seminorm
from .errors import NonRadialSource, PartitionMismatch, PerturbError, UnconvergedInput
from .extension import GapResult, HeightGrid, cs_extend, perturbed_extension_gap
from .spectral import PolarField, RadialProfile
from .spherical import (
    PerturbationFactor,
    SphericalEigenpair,
    SymmetryGroup,
    invariant_first_eigenvalue,
    perturbation_factor,
    zonal_quadrature,
)


def _radial_source(u) -> RadialProfile:
    field = getattr(u, "field", u)
    if isinstance(field, RadialProfile):
        return field
    if isinstance(field, PolarField):
        if field.is_radial and (field.sin_coeffs is None or not np.any(field.sin_coeffs)):
            return field.mode_profile(0)
        raise NonRadialSource("the source field has non-radial modes")
    raise PerturbError(f"unsupported source type {type(field).__name__}")


@dataclass(frozen=True, eq=False)
class PerturbedFunction:
    """u(|x|) F(x) with F the block factor of ``pair``.

    For m = 1 ``field`` is the single-mode PolarField u(r) phi(sigma), on
    which every energy is exact; for m > 1 only pointwise evaluation and
    the extension F w are available.
    """

    source: RadialProfile
    pair: SphericalEigenpair
    k: int
    m: int
    factor: PerturbationFactor
    field: Optional[PolarField]

    @property
    def n(self) -> int:
        return self.k * self.m

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        return self.source.interpolate(r) * self.factor(x)


def build_perturbed(u, pair: SphericalEigenpair, partition=None) -> PerturbedFunction:
    """Form u F for a radial u and an eigenpair on S^{k-1}; ``partition`` = (k, m)."""
    src = _radial_source(u)
    k, m = partition if partition is not None else (pair.k, src.n // pair.k)
    if k * m != src.n or pair.k != k:
        raise PartitionMismatch(f"n = {src.n} does not split as k*m = {k}*{m} for an eigenpair on S^{pair.k - 1}")
    factor = perturbation_factor(pair, k, m)
    field = PolarField.from_profile(src, pair.ell) if m == 1 else None
    return PerturbedFunction(src, pair, int(k), int(m), factor, field)


def _factor_moments(pert: PerturbedFunction, order: int = 48):
    """Sphere averages of F and F^2 on S^{n-1} by tensor Gauss rules."""
    xs, ws = zonal_quadrature(pert.k, order)
    phi = pert.pair.zonal(xs)
    if pert.m == 1:
        return float(ws @ phi), float(ws @ phi ** 2)
    if pert.m == 2:
        # x = r (cos a sigma_1, sin a sigma_2); with c = cos 2a the measure
        # cos^{k-1} a sin^{k-1} a da is proportional to (1 - c^2)^{(k-2)/2} dc
        c, wc = roots_jacobi(order, (pert.k - 2) / 2.0, (pert.k - 2) / 2.0)
        wc = wc / wc.sum()
        f1 = np.sqrt((1 + c) / 2)
        f2 = np.sqrt((1 - c) / 2)
        big_f = (f1[:, None, None] * phi[None, :, None] + f2[:, None, None] * phi[None, None, :])
        wt = wc[:, None, None] * ws[None, :, None] * ws[None, None, :]
        return float(np.sum(wt * big_f)), float(np.sum(wt * big_f ** 2))
    raise PerturbError("normal integrals are implemented for m = 1 and m = 2")


@dataclass(frozen=True)
class NormalIdentities:
    """int |x|^{-bq} |u|^{q-2} u u~ (cross) and int |x|^{-bq} |u|^{q-2} u~^2 (quad)
    against lq = int |x|^{-bq} |u|^q."""

    cross: float
    quad: float
    lq: float

    @property
    def cross_normalized(self) -> float:
        return abs(self.cross) / self.lq

    @property
    def quad_rel_error(self) -> float:
        return abs(self.quad - self.lq) / self.lq

    def to_dict(self) -> dict:
        return dict(asdict(self), cross_normalized=self.cross_normalized,
                    quad_rel_error=self.quad_rel_error)


def normal_identities(pert: PerturbedFunction, params: ProblemParams) -> NormalIdentities:
    lq = lq_integral(pert.source, params.b, params.q)
    mean_f, mean_f2 = _factor_moments(pert)
    return NormalIdentities(cross=lq * mean_f, quad=lq * mean_f2, lq=lq)


@dataclass(frozen=True)
class EnergyGap:
    """gap = ||D^{s/2} u~||^2 - ||D^{s/2} u||^2 on the exact path (m = 1), or its
    upper bound C_s * (extension gap) on the extension path."""

    gap: float
    bound: float
    path: str
    c_mu: float
    hardy: float
    extension_gap: Optional[float]
    extension: Optional[GapResult]

    @property
    def margin(self) -> float:
        return self.bound - self.gap

    @property
    def holds(self) -> bool:
        return self.gap <= self.bound

    @property
    def chain_holds(self) -> Optional[bool]:
        if self.extension_gap is None:
            return None
        return self.gap <= self.extension_gap <= self.bound

    def to_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "extension"}
        out["extension"] = None if self.extension is None else self.extension.to_dict()
        out.update(margin=self.margin, holds=self.holds, chain_holds=self.chain_holds)
        return out


def energy_gap(pert: PerturbedFunction, params: ProblemParams, path: Optional[str] = None,
               with_extension: bool = True, heights: Optional[HeightGrid] = None) -> EnergyGap:
    """Gap of the seminorm under u -> u F and the bound c_mu * Hardy(u).

    ``path`` is ``exact`` (m = 1 only) or ``extension``; the default is the
    exact path when available. With ``with_extension`` the exact path also
    evaluates the extension bound so the chain can be checked.
    """
    s = params.s
    hardy = hardy_integral(pert.source, s)
    cm = c_mu(params, pert.pair.mu)
    bound = cm * hardy
    if path is None:
        path = "exact" if pert.m == 1 else "extension"
    ext_gap = ext = None
    if path == "extension" or with_extension:
        ext = perturbed_extension_gap(cs_extend(pert.source, s), pert.pair, pert.m, heights)
        ext_gap = cs_constant(s) * ext.gap
    if path == "exact":
        if pert.field is None:
            raise PerturbError("the exact path needs m = 1")
        gap = seminorm(pert.field, s) - seminorm(pert.source, s)
    elif path == "extension":
        gap = ext_gap
    else:
        raise PerturbError(f"unknown path {path!r}")
    return EnergyGap(gap=float(gap), bound=float(bound), path=path, c_mu=cm, hardy=hardy,
                     extension_gap=ext_gap, extension=ext)


@dataclass(frozen=True)
class BreakingCertificate:
    """Second-variation test of u against u~ = u phi.

    margin = (q-1) Q(u) * quad/lq - Q(u~); a positive margin means the
    second variation of J along u~ is negative, so u is not a minimizer.
    ``tolerance`` is absolute: relative_tolerance * (q-1) Q(u).
    """

    lam: float
    ell: int
    mu: float
    q_u: float
    q_tilde: float
    margin: float
    relative_margin: float
    tolerance: float
    relative_tolerance: float
    verdict: str
    normal_ratio: float
    cross_normalized: float
    el_residual: float

    def to_dict(self) -> dict:
        return asdict(self)


def certify(u, params: ProblemParams, pair: SphericalEigenpair, tolerance: float = 1e-4,
            el_tolerance: float = 1e-4) -> BreakingCertificate:
    """Certificate for a radial candidate u (profile or minimization result)."""
    converged = getattr(u, "converged", True)
    if not converged:
        raise UnconvergedInput("the candidate minimizer did not converge")
    src = _radial_source(u)
    res = getattr(u, "residual", None)
    if res is None:
        res = el_residual(src, params)
    if res > el_tolerance:
        raise UnconvergedInput(f"EL residual {res:.3e} exceeds {el_tolerance:.1e}")
    pert = build_perturbed(src, pair, (pair.k, src.n // pair.k))
    if pert.m != 1:
        raise PerturbError("certificates need the exact path (m = 1)")
    s = params.s
    hardy = hardy_integral(src, s)
    q_u = seminorm(src, s) + params.lam * hardy
    q_tilde = seminorm(pert.field, s) + params.lam * hardy_integral(pert.field, s)
    normal = normal_identities(pert, params)
    lead = (params.q - 1) * q_u
    margin = lead * normal.quad / normal.lq - q_tilde
    tol_abs = tolerance * lead
    if margin > tol_abs:
        verdict = "unstable"
    elif margin < -tol_abs:
        verdict = "stable"
    else:
        verdict = "inconclusive"
    return BreakingCertificate(
        lam=params.lam, ell=pair.ell, mu=pair.mu, q_u=q_u, q_tilde=q_tilde, margin=margin,
        relative_margin=margin / lead, tolerance=tol_abs, relative_tolerance=tolerance,
        verdict=verdict, normal_ratio=normal.quad / normal.lq,
        cross_normalized=normal.cross_normalized, el_residual=float(res),
    )


@dataclass(frozen=True)
class ThresholdBound:
    mu: float
    c_mu: float
    lambda_bound: float
    hardy: float
    c_hat: float
    regime_note: str
    m: int
    q: float

    def to_dict(self) -> dict:
        return asdict(self)


def threshold(params: ProblemParams,
              group_or_pair: Union[SymmetryGroup, SphericalEigenpair]) -> ThresholdBound:
    """lambda bound above which no block-radial function is extremal."""
    if isinstance(group_or_pair, SymmetryGroup):
        pair = invariant_first_eigenvalue(group_or_pair)
    else:
        pair = group_or_pair
    if pair.k != params.k:
        raise PartitionMismatch(f"eigenpair on S^{pair.k - 1} but params use k = {params.k}")
    ch = params.require_c_hat()
    note = {"default": "c_hat = 1 (justified default)",
            "explicit": f"c_hat = {ch!r} supplied explicitly"}.get(params.c_hat_note, params.c_hat_note)
    return ThresholdBound(mu=pair.mu, c_mu=c_mu(params, pair.mu),
                          lambda_bound=breaking_threshold(params, pair.mu),
                          hardy=hardy_constant(params.n, params.s), c_hat=ch,
                          regime_note=note, m=params.m, q=params.q)
