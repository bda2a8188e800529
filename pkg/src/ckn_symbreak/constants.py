"""Problem parameters and closed-form constants.

All Gamma-function values come from :mod:`scipy.special`; every argument
used here lies in a range where those routines are accurate to roundoff.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import gammaln

from .errors import (
    BadFactorization,
    CHatUnjustified,
    LambdaBelowHardy,
    MuNonpositive,
    ParameterError,
    QOutOfRange,
)

CHatSpec = Union[None, str, float]


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def critical_exponent(n: int, s: float) -> float:
    """Fractional Sobolev exponent 2n/(n-2s)."""
    return 2.0 * n / (n - 2.0 * s)


def c_hat_justified(n: int, s: float) -> bool:
    """Whether the extension-Hardy constant may default to one."""
    return n >= 4 or (n == 3 and s <= 0.5)


def _check_ns(n, s):
    if not (isinstance(n, (int, np.integer)) and n >= 2):
        raise ParameterError(f"n must be an integer >= 2, got {n!r}")
    if not (math.isfinite(s) and 0.0 < s < 1.0):
        raise ParameterError(f"s must lie in (0, 1), got {s!r}")
    if n <= 2 * s:
        raise ParameterError(f"need n > 2s, got n={n}, s={s}")


def hardy_constant(n: int, s: float) -> float:
    """Sharp constant of the fractional Hardy inequality.

    H_s = 2^{2s} Gamma((n+2s)/4)^2 / Gamma((n-2s)/4)^2
    """
    _check_ns(n, s)
    a = (n + 2 * s) / 4.0
    b = (n - 2 * s) / 4.0
    return float(2.0 ** (2 * s) * np.exp(2.0 * (gammaln(a) - gammaln(b))))


def cs_constant(s: float) -> float:
    """Normalization of the extension energy, Gamma(s) / (2^{1-2s} Gamma(1-s))."""
    if not 0.0 < s < 1.0:
        raise ParameterError(f"s must lie in (0, 1), got {s!r}")
    return float(_gamma(s) / (2.0 ** (1 - 2 * s) * _gamma(1 - s)))


def gamma_constant(s: float, c_hat: float = 1.0) -> float:
    """Half-space Hardy constant c_hat * Gamma(s) Gamma(1-s) / 2."""
    if not 0.0 < s < 1.0:
        raise ParameterError(f"s must lie in (0, 1), got {s!r}")
    if not c_hat > 0:
        raise ParameterError(f"c_hat must be positive, got {c_hat!r}")
    return float(c_hat * _gamma(s) * _gamma(1 - s) / 2.0)


def sobolev_constant(n: int, s: float) -> float:
    """Sharp constant S in ||(-Delta)^{s/2} u||_2^2 >= S ||u||_{2*}^2."""
    _check_ns(n, s)
    lead = 2.0 ** (2 * s) * math.pi ** s
    ratio = math.exp(gammaln((n + 2 * s) / 2.0) - gammaln((n - 2 * s) / 2.0))
    vol = math.exp(gammaln(n / 2.0) - gammaln(n)) ** (2 * s / n)
    return float(lead * ratio * vol)


@dataclass(frozen=True)
class ProblemParams:
    """Validated parameter set.

    ``c_hat`` is ``None`` when no value is justified and none was given;
    functions that need it then raise :class:`CHatUnjustified`.
    """

    n: int
    s: float
    q: float
    b: float
    lam: float
    m: int
    k: int
    c_hat: Optional[float]
    c_hat_note: str

    @property
    def critical(self) -> float:
        return critical_exponent(self.n, self.s)

    @property
    def hardy(self) -> float:
        return hardy_constant(self.n, self.s)

    def require_c_hat(self) -> float:
        if self.c_hat is None:
            raise CHatUnjustified(
                f"c_hat has no justified default for n={self.n}, s={self.s}; "
                "supply it explicitly"
            )
        return self.c_hat

    def with_lambda(self, lam: float) -> "ProblemParams":
        return validate_params(self.n, self.s, self.q, lam=lam, m=self.m,
                               k=self.k, c_hat=self._c_hat_spec())

    def _c_hat_spec(self) -> CHatSpec:
        return self.c_hat if self.c_hat_note == "explicit" else None

    def to_dict(self) -> dict:
        return asdict(self)


def validate_params(n, s, q, lam=0.0, m=1, k=None, c_hat: CHatSpec = None) -> ProblemParams:
    """Check a raw parameter tuple and derive the weight exponent b.

    Parameters
    ----------
    n, s, q, lam : numbers
        Dimension, fractional order, nonlinearity exponent, Hardy coefficient.
    m, k : int
        Block structure R^n = (R^k)^m; ``k`` defaults to ``n // m``.
    c_hat : None, "default" or float
        ``None`` picks 1 where justified and leaves it unset otherwise,
        ``"default"`` insists on the justified default, a float is explicit.
    """
    for name, val in (("s", s), ("q", q), ("lambda", lam)):
        if not math.isfinite(float(val)):
            raise ParameterError(f"{name} must be finite, got {val!r}")
    n = int(n)
    m = int(m)
    s = float(s)
    q = float(q)
    lam = float(lam)
    _check_ns(n, s)
    if m < 1:
        raise BadFactorization(f"m must be >= 1, got {m}")
    if k is None:
        k = n // m
    k = int(k)
    if k < 2 or k * m != n:
        raise BadFactorization(f"n = {n} is not k*m with k = {k} >= 2, m = {m}")
    crit = critical_exponent(n, s)
    if not 2.0 < q < crit:
        raise QOutOfRange(f"q = {q} outside (2, {crit:.12g}) for n={n}, s={s}")
    b = n / q - n / 2.0 + s
    hs = hardy_constant(n, s)
    if lam <= -hs:
        raise LambdaBelowHardy(f"lambda = {lam} <= -H_s = {-hs:.12g}")

    if c_hat is None or (isinstance(c_hat, str) and c_hat == "default"):
        if c_hat_justified(n, s):
            value, note = 1.0, "default"
        elif c_hat is None:
            value, note = None, "unset"
        else:
            raise CHatUnjustified(
                f"no justified default c_hat for n={n}, s={s}; supply a value")
    elif isinstance(c_hat, str):
        raise ParameterError(f"c_hat must be a number or 'default', got {c_hat!r}")
    else:
        value = float(c_hat)
        if not (math.isfinite(value) and value > 0):
            raise ParameterError(f"c_hat must be positive, got {c_hat!r}")
        note = "explicit"
    return ProblemParams(n=n, s=s, q=q, b=b, lam=lam, m=m, k=k,
                         c_hat=value, c_hat_note=note)


def c_mu(params: ProblemParams, mu: float) -> float:
    """Energy-gap constant C_s (m mu + m + 1 - 2s) gamma."""
    if not mu > 0:
        raise MuNonpositive(f"mu must be positive, got {mu!r}")
    ch = params.require_c_hat()
    factor = params.m * mu + params.m + 1 - 2 * params.s
    return cs_constant(params.s) * factor * gamma_constant(params.s, ch)


def c_mu_closed(s: float, m: int, mu: float, c_hat: float) -> float:
    """Same constant written as c_hat (m mu + m + 1 - 2s) Gamma(s)^2 2^{2s-2}."""
    if not mu > 0:
        raise MuNonpositive(f"mu must be positive, got {mu!r}")
    return float(c_hat * (m * mu + m + 1 - 2 * s) * _gamma(s) ** 2 * 2.0 ** (2 * s - 2))


def breaking_threshold(params: ProblemParams, mu: float) -> float:
    """lambda above which no block-radial function can be extremal."""
    return -hardy_constant(params.n, params.s) + c_mu(params, mu) / (params.q - 2.0)


@dataclass(frozen=True)
class ConstantsTable:
    hardy: float
    cs: float
    gamma: Optional[float]
    sobolev: Optional[float]
    c_mu: Optional[float]
    lambda_bound: Optional[float]
    mu: Optional[float]
    c_hat: Optional[float]
    c_hat_note: str

    def to_dict(self) -> dict:
        return asdict(self)


def constants_table(params: ProblemParams, mu: Optional[float] = None) -> ConstantsTable:
    """Collect every constant for ``params``; entries needing an unset c_hat are None."""
    ch = params.c_hat
    gam = gamma_constant(params.s, ch) if ch is not None else None
    cm = thr = None
    if mu is not None and ch is not None:
        cm = c_mu(params, mu)
        thr = breaking_threshold(params, mu)
    elif mu is not None and not mu > 0:
        raise MuNonpositive(f"mu must be positive, got {mu!r}")
    return ConstantsTable(
        hardy=hardy_constant(params.n, params.s),
        cs=cs_constant(params.s),
        gamma=gam,
        sobolev=sobolev_constant(params.n, params.s),
        c_mu=cm,
        lambda_bound=thr,
        mu=None if mu is None else float(mu),
        c_hat=ch,
        c_hat_note=params.c_hat_note,
    )
