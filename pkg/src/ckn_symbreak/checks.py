"""Conformance suites: each returns rows (check, lhs, rhs, margin, tolerance, passed).

Equality rows compare ``lhs`` with the reference ``rhs`` and report the
relative error as ``margin`` (pass when margin <= tolerance). Inequality rows
assert lhs <= rhs (1 + tolerance) and report margin = rhs - lhs.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Sequence

from scipy.special import gamma as _gamma

from .constants import (
    c_mu,
    c_mu_closed,
    cs_constant,
    gamma_constant,
    validate_params,
)
from .corpus import PROFILES, corpus
from .extension import (
    bessel_energy_integral,
    cs_extend,
    extension_report,
    g_algebra_check,
)
from .perturb import build_perturbed, energy_gap, normal_identities
from .spectral import halfline_weight_integral
from .spherical import eigenpair_degree

S_VALUES = tuple(round(0.1 * i, 1) for i in range(1, 10))
QUAD_D_PROFILES = ("gaussian", "algebraic", "exponential")


@dataclass(frozen=True)
class CheckRow:
    check: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    passed: bool
    residual: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def equality(check: str, value: float, reference: float, tol: float, residual: float = 0.0) -> CheckRow:
    err = abs(value - reference) / abs(reference)
    return CheckRow(check, float(value), float(reference), float(err), tol, bool(err <= tol), float(residual))


def inequality(check: str, lhs: float, rhs: float, tol: float, residual: float = 0.0) -> CheckRow:
    return CheckRow(check, float(lhs), float(rhs), float(rhs - lhs), tol,
                    bool(lhs <= rhs * (1 + tol)), float(residual))


def _mid_q(n: int, s: float) -> float:
    return 1.0 + n / (n - 2 * s)


def constants_suite(s_values: Sequence[float] = S_VALUES) -> List[CheckRow]:
    rows = []
    for s in s_values:
        rows.append(equality(f"gamma(s={s})", gamma_constant(s, 1.0),
                             math.pi / (2 * math.sin(math.pi * s)), 1e-12))
    rows.append(equality("C_s(s=0.5)", cs_constant(0.5), 1.0, 1e-15))
    for n, s, m, mu in ((4, 0.5, 1, 3.0), (4, 0.25, 2, 1.0), (3, 0.75, 1, 6.0), (6, 0.5, 3, 1.0)):
        p = validate_params(n, s, _mid_q(n, s), m=m, c_hat=1.0)
        rows.append(equality(f"c_mu(n={n},s={s},m={m},mu={mu})", c_mu(p, mu),
                             c_mu_closed(s, m, mu, 1.0), 1e-12))
    return rows


def halfline_suite(s_values: Sequence[float] = S_VALUES,
                   xs: Sequence[float] = (0.5, 1.0, 2.0)) -> List[CheckRow]:
    rows = []
    for s in s_values:
        for x in xs:
            val, res = halfline_weight_integral(s, x, with_residual=True)
            ref = 0.5 * _gamma(s) * _gamma(1 - s) * abs(x) ** (-2 * s)
            rows.append(equality(f"halfline(s={s},x={x})", val, ref, 1e-6, res))
    return rows


def extension_suite(n: int, s: float, profiles: Optional[Sequence[str]] = None,
                    ys: Sequence[float] = (0.1, 1.0, 10.0), c_hat: float = 1.0,
                    quad_d_profiles: Sequence[str] = QUAD_D_PROFILES) -> List[CheckRow]:
    """quad_D, the Bessel integral, the slice Hardy inequality, the half-space
    Hardy inequality with gamma, and the W^s Hardy inequality."""
    rows = []
    val, res = bessel_energy_integral(s, with_residual=True)
    rows.append(equality(f"I_s*C_s(s={s})", val * cs_constant(s), 1.0, 1e-6, res))
    gam = gamma_constant(s, 1.0)
    lead = ((n - 2 * s) / 2.0) ** 2
    names = list(profiles or PROFILES)
    for name, prof in corpus(n, names=sorted(set(names) | set(quad_d_profiles))).items():
        rep = extension_report(cs_extend(prof, s), ys=ys, c_hat=c_hat)
        tag = f"n={n},s={s},{name}"
        if name in quad_d_profiles:
            rows.append(equality(f"quad_D({tag})", rep.cs * rep.dirichlet, rep.seminorm, 1e-3,
                                 rep.cs * rep.dirichlet_residual))
        if name not in names:
            continue
        for c in rep.slice_checks:
            rows.append(inequality(f"slice_hardy({tag},y={c.y})", c.lhs, c.rhs, 1e-6))
        rows.append(inequality(f"halfspace_hardy({tag})", rep.halfplane_hardy,
                               gam * rep.hardy_source, 1e-6, rep.hardy_residual))
        rows.append(inequality(f"ws_hardy({tag})", lead * rep.halfplane_hardy, rep.dirichlet, 1e-6,
                               rep.dirichlet_residual))
    return rows


def lemma_suite(n: int, s: float, ells: Sequence[int] = (1, 2), profiles: Optional[Sequence[str]] = None,
                c_hat=None) -> List[CheckRow]:
    """Normal identities and the chain exact gap <= C_s extension gap <= c_mu Hardy (m = 1)."""
    params = validate_params(n, s, _mid_q(n, s), c_hat=c_hat)
    rows = []
    for name, prof in corpus(n, names=profiles).items():
        for ell in ells:
            pert = build_perturbed(prof, eigenpair_degree(n, ell))
            tag = f"n={n},s={s},{name},ell={ell}"
            ni = normal_identities(pert, params)
            rows.append(CheckRow(f"normal_cross({tag})", ni.cross_normalized, 0.0,
                                 ni.cross_normalized, 1e-10, ni.cross_normalized <= 1e-10))
            rows.append(equality(f"normal_quad({tag})", ni.quad, ni.lq, 1e-8))
            gap = energy_gap(pert, params)
            err = gap.extension.error * cs_constant(s)
            rows.append(inequality(f"gap_exact_le_extension({tag})", gap.gap, gap.extension_gap, 1e-6, err))
            rows.append(inequality(f"gap_extension_le_bound({tag})", gap.extension_gap, gap.bound, 1e-6, err))
    return rows


def algebra_suite(s_values: Sequence[float] = (0.25, 0.5, 0.75),
                  blocks: Sequence[tuple] = ((4, 1), (2, 2)), ells: Sequence[int] = (1, 2),
                  seed: int = 0) -> List[CheckRow]:
    rows = []
    for k, m in blocks:
        for ell in ells:
            for s in s_values:
                chk = g_algebra_check(eigenpair_degree(k, ell), m, s, points=100, step=1e-4, seed=seed)
                rows.append(CheckRow(f"g_algebra(k={k},m={m},ell={ell},s={s})", chk.max_rel_error, 0.0,
                                     chk.max_rel_error, 1e-4, bool(chk.max_rel_error <= 1e-4)))
    return rows


SUITES: Dict[str, Callable] = {
    "constants": constants_suite,
    "halfline": halfline_suite,
    "extension": extension_suite,
    "lemma": lemma_suite,
    "algebra": algebra_suite,
}
