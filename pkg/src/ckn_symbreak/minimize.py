"""Minimizers of J_lambda: radial, Z_t-sector (n = 2), the lambda sweep and
the sector comparison u_t, v_t, u_T.

All iterations run in g = r^{(n-2s)/2} u on a periodic grid in t = ln r,
where Q_lambda is the Fourier multiplier Phi + lambda and the constraint is
|S^{n-1}| int |g|^q dt = 1. Each step is a damped conditional-gradient
(nonlinear power) update

    v = |(Phi + lambda)^{-1} P(g^{q-1})|,   g <- normalize((1 - a) g + a v),

with P the projection onto the admissible angular modes. The damping a
starts at one and is halved until J does not increase, so J is
non-increasing along accepted iterates.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, replace
from typing import List, Optional, Sequence, Union

import numpy as np

from .constants import ProblemParams, sphere_area
from .energy import EnergyReport, discretization_error, energy_report
from .errors import (
    DegenerateStart,
    MinimizeError,
    ModeTruncationError,
    NotConverged,
    RadialCollapse,
    SweepInconclusive,
)
from .perturb import ThresholdBound, certify, threshold
from .spectral import PolarField, RadialGrid, RadialProfile, decay_rate, hardy_symbol
from .spherical import SphericalEigenpair, SymmetryGroup, eigenpair_degree


@dataclass(frozen=True)
class MinimizeConfig:
    """Discretization and iteration controls.

    The t-grid has half width ``half_range`` (default ``decay_width`` over
    the linear decay rate) and spacing at most
    ``spacing / (1 + max(lambda, 0))^{1/(2s)}``, using the smallest power of
    two >= ``min_nodes`` points, unless ``nodes`` is given. Sector runs
    keep modes up to ``max_mode`` (default ``mode_factor * t``) and
    collocate on ``collocation_factor * max_mode`` angles.
    """

    half_range: Optional[float] = None
    nodes: Optional[int] = None
    decay_width: float = 40.0
    spacing: float = 0.1
    min_nodes: int = 2048
    max_nodes: int = 2 ** 19
    max_iter: int = 4000
    el_tol: float = 1e-7
    min_step: float = 1e-8
    step_shrink: float = 0.5
    seed: int = 0
    mode_factor: int = 8
    max_mode: Optional[int] = None
    collocation_factor: int = 4
    perturbation: float = 0.1
    mode_tol: float = 1e-6
    recenter_every: int = 25

    def __post_init__(self):
        if not (self.el_tol > 0 and self.min_step > 0 and 0 < self.step_shrink < 1):
            raise MinimizeError("tolerances must be positive and the shrink factor in (0, 1)")
        if self.max_iter < 1:
            raise MinimizeError("max_iter must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class MinimizeResult:
    field: Union[RadialProfile, PolarField]
    report: EnergyReport
    residual: float
    iterations: int
    converged: bool
    group: SymmetryGroup
    history: List[float]
    multiplier: float
    seed: int
    config: MinimizeConfig
    elapsed: float = 0.0
    mode_fractions: Optional[dict] = None

    @property
    def j(self) -> float:
        return self.report.j_lambda

    def to_dict(self, include_field: bool = True) -> dict:
        out = {
            "report": self.report.to_dict(), "residual": self.residual,
            "iterations": self.iterations, "converged": self.converged,
            "group": self.group.to_dict(), "history": list(self.history),
            "multiplier": self.multiplier, "seed": self.seed, "config": self.config.to_dict(),
        }
        if self.mode_fractions is not None:
            out["mode_fractions"] = {str(k): v for k, v in sorted(self.mode_fractions.items())}
        if include_field:
            f = self.field
            out["field"] = {"grid": f.grid.to_dict(), "n": f.n}
            if isinstance(f, RadialProfile):
                out["field"]["values"] = [float(v) for v in f.values]
            else:
                out["field"].update(
                    modes=list(f.modes), n_angular=f.n_angular,
                    cos=[[float(v) for v in row] for row in f.coeffs],
                    sin=None if f.sin_coeffs is None else [[float(v) for v in row] for row in f.sin_coeffs])
        return out


def solver_grid(params: ProblemParams, config: MinimizeConfig) -> RadialGrid:
    """Periodic t-grid adapted to the decay rate and core width at lambda."""
    if config.half_range is not None:
        half = config.half_range
    else:
        half = config.decay_width / decay_rate(params.n, params.s, params.lam)
    if config.nodes is not None:
        return RadialGrid.symmetric(half, config.nodes)
    dt_max = config.spacing / (1.0 + max(params.lam, 0.0)) ** (1.0 / (2 * params.s))
    size = config.min_nodes
    while 2 * half / size > dt_max:
        size *= 2
    if size > config.max_nodes:
        raise MinimizeError(f"the grid needs {size} nodes (> max_nodes = {config.max_nodes}); "
                            "raise max_nodes or the spacing factor")
    return RadialGrid.symmetric(half, size)


class _Problem:
    """Discrete problem on a (angle x t) array; the radial case has one angle."""

    def __init__(self, params: ProblemParams, grid: RadialGrid, modes: Optional[np.ndarray] = None,
                 n_theta: int = 1):
        self.params = params
        self.grid = grid
        self.n_theta = n_theta
        self.q = params.q
        tau = grid.frequencies
        if modes is None:
            self.mult = (hardy_symbol(params.n, params.s, 0, tau) + params.lam)[None, :]
            self.mask = None
        else:
            ells = np.arange(n_theta // 2 + 1)
            self.mask = np.isin(ells, modes)
            self.mult = hardy_symbol(params.n, params.s, ells[:, None], tau[None, :]) + params.lam
        self.measure = sphere_area(params.n) * grid.dt / n_theta

    def fwd(self, g):
        if self.mask is None:
            return np.fft.fft(g[0])[None, :]
        return np.fft.rfftn(g, axes=(1, 0))

    def inv(self, spec):
        if self.mask is None:
            return np.fft.ifft(spec[0]).real[None, :]
        return np.fft.irfftn(spec, s=(self.grid.size, self.n_theta), axes=(1, 0))

    def project_spec(self, spec):
        if self.mask is not None:
            spec = spec * self.mask[:, None]
        return spec

    def project(self, g):
        return g if self.mask is None else self.inv(self.project_spec(self.fwd(g)))

    def lq(self, g):
        return self.measure * np.sum(np.abs(g) ** self.q)

    def normalize(self, g):
        return g / self.lq(g) ** (1.0 / self.q)

    def quad(self, spec):
        """Q_lambda of the field whose spectrum is ``spec``."""
        power = np.abs(spec) ** 2
        if self.mask is not None:
            # rfft halves the spectrum: interior angular bins count twice
            wts = np.full(power.shape[0], 2.0)
            wts[0] = 1.0
            if self.n_theta % 2 == 0:
                wts[-1] = 1.0
            power = power * wts[:, None]
        return float(self.measure / self.grid.size * np.sum(self.mult * power))

    def step(self, g):
        """Conditional-gradient direction and EL residual at g (normalized)."""
        non = np.abs(g) ** (self.q - 1)
        non_spec = self.project_spec(self.fwd(non))
        g_spec = self.fwd(g)
        lin = self.inv(self.mult * g_spec)
        pnon = self.inv(non_spec)
        kappa = np.sum(lin * pnon) / np.sum(pnon * pnon)
        resid = math.sqrt(np.sum((lin - kappa * pnon) ** 2) / np.sum(lin ** 2))
        v = np.abs(self.inv(non_spec / self.mult))
        v = self.project(v)
        return v, resid, float(kappa), self.quad(g_spec)


def _radial_guess(params: ProblemParams, grid: RadialGrid, rng: np.random.Generator) -> np.ndarray:
    """g of the power-decay bump r^a (1+r^2)^{-beta} with random (a, beta)."""
    a = rng.uniform(0.5, 2.0)
    lead = a + (params.n - 2 * params.s) / 2.0
    beta = lead / 2.0 + rng.uniform(0.5, 1.5)
    t = grid.log_nodes
    return np.exp(lead * t - beta * np.logaddexp(0.0, 2 * t))


def _iterate(prob: _Problem, g0: np.ndarray, config: MinimizeConfig):
    if not np.any(g0):
        raise DegenerateStart("the initial guess vanishes")
    g = prob.normalize(np.abs(prob.project(np.abs(g0))))
    v, resid, kappa, j = prob.step(g)
    history = [j]
    alpha = 1.0
    it = 0
    while it < config.max_iter and resid > config.el_tol:
        it += 1
        while True:
            cand = prob.normalize((1 - alpha) * g + alpha * v)
            cv, cres, ckap, cj = prob.step(cand)
            if cj <= j:
                break
            alpha *= config.step_shrink
            if alpha < config.min_step:
                break
        if cj > j:
            break
        g, v, resid, kappa, j = cand, cv, cres, ckap, cj
        history.append(j)
        alpha = min(1.0, 2 * alpha)
        if config.recenter_every and it % config.recenter_every == 0:
            # J is invariant under integer shifts in t; keep the core centered
            shift = int(np.argmax(np.max(np.abs(g), axis=0))) - prob.grid.size // 2
            if abs(shift) > prob.grid.size // 8:
                g = np.roll(g, -shift, axis=1)
                v = np.roll(v, -shift, axis=1)
    return g, resid, kappa, it, history


def minimize_radial(params: ProblemParams, config: Optional[MinimizeConfig] = None,
                    initial: Optional[RadialProfile] = None) -> MinimizeResult:
    """Radial minimizer of J_lambda (nonnegative, normalized to unit L^q mass)."""
    config = config or MinimizeConfig()
    start = time.perf_counter()
    grid = solver_grid(params, config)
    prob = _Problem(params, grid)
    if initial is not None:
        if initial.grid != grid:
            g0 = np.interp(grid.log_nodes, initial.grid.log_nodes, initial.log_values(params.s),
                           left=0.0, right=0.0)
        else:
            g0 = initial.log_values(params.s)
    else:
        g0 = _radial_guess(params, grid, np.random.default_rng(config.seed))
    g, resid, kappa, it, history = _iterate(prob, g0[None, :], config)
    prof = RadialProfile.from_log_values(grid, g[0], params.n, params.s)
    return MinimizeResult(
        field=prof, report=energy_report(prof, params), residual=resid, iterations=it,
        converged=resid <= config.el_tol, group=SymmetryGroup.orthogonal(params.n),
        history=history, multiplier=kappa, seed=config.seed, config=config,
        elapsed=time.perf_counter() - start,
    )


def multistart_radial(params: ProblemParams, config: Optional[MinimizeConfig] = None,
                      starts: int = 5) -> List[MinimizeResult]:
    config = config or MinimizeConfig()
    return [minimize_radial(params, replace(config, seed=config.seed + i)) for i in range(starts)]


def _sector_modes(t: int, max_mode: int) -> np.ndarray:
    return np.arange(0, max_mode + 1, t)


def minimize_sector(params: ProblemParams, t: int, config: Optional[MinimizeConfig] = None,
                    initial: Optional[PolarField] = None, max_mode: Optional[int] = None,
                    check_truncation: bool = True) -> MinimizeResult:
    """Minimizer of J_lambda among Z_t-invariant functions on R^2.

    Raises
    ------
    ModeTruncationError
        if the highest retained mode carries more than ``config.mode_tol``
        of the Hardy mass; the result is attached to the exception.
    """
    if params.n != 2:
        raise MinimizeError("sector minimization is defined for n = 2")
    if t < 1:
        raise MinimizeError(f"t must be >= 1, got {t}")
    config = config or MinimizeConfig()
    start = time.perf_counter()
    grid = solver_grid(params, config)
    top = max_mode or config.max_mode or config.mode_factor * t
    top = (top // t) * t
    if top < t:
        raise MinimizeError(f"max_mode {top} keeps no non-radial mode for t = {t}")
    n_theta = config.collocation_factor * top
    modes = _sector_modes(t, top)
    prob = _Problem(params, grid, modes, n_theta)
    w = grid.nodes ** ((params.n - 2 * params.s) / 2.0)
    if initial is not None:
        if initial.grid != grid or initial.n_angular != n_theta:
            raise MinimizeError("initial field must live on the solver grid and collocation")
        if any(l % t or l > top for l in initial.modes):
            raise MinimizeError("initial field has modes outside the sector mode set")
        g0 = initial.node_values() * w[None, :]
    else:
        rng = np.random.default_rng(config.seed)
        rad = _radial_guess(params, grid, rng)
        th = 2 * np.pi * np.arange(n_theta) / n_theta
        phase = rng.uniform(0, 2 * np.pi)
        amp = config.perturbation * math.sqrt(2.0)
        g0 = rad[None, :] * (1 + amp * np.cos(t * th + phase))[:, None]
    g, resid, kappa, it, history = _iterate(prob, g0, config)
    field = PolarField.from_samples(grid, g / w[None, :], modes)
    group = SymmetryGroup.sector(t)
    res = MinimizeResult(
        field=field, report=energy_report(field, params), residual=resid, iterations=it,
        converged=resid <= config.el_tol, group=group, history=history, multiplier=kappa,
        seed=config.seed, config=config, elapsed=time.perf_counter() - start,
        mode_fractions=field.mode_energy_fractions(params.s),
    )
    if check_truncation and res.mode_fractions.get(top, 0.0) > config.mode_tol:
        raise ModeTruncationError(
            f"mode {top} carries {res.mode_fractions[top]:.2e} of the Hardy mass "
            f"(limit {config.mode_tol:.0e}); raise max_mode", res)
    return res


# ---------------------------------------------------------------------------
# lambda sweep


@dataclass(frozen=True)
class SweepRow:
    lam: float
    ell: int
    mu: float
    q_u: float
    q_tilde: float
    margin: float
    relative_margin: float
    verdict: str
    j: float
    residual: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SweepResult:
    rows: List[SweepRow]
    onsets: dict
    bracket: Optional[tuple]
    lambda_hat: Optional[float]
    minimal_unstable_mode: Optional[int]
    threshold: Optional[ThresholdBound]
    within_bound: Optional[bool]
    anomalies: List[str]
    flags: List[str]
    lambda_tol: float
    stable_at_nonpositive: bool

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "onsets": {str(k): (list(v) if v is not None else None) for k, v in sorted(self.onsets.items())},
            "bracket": None if self.bracket is None else list(self.bracket),
            "lambda_hat": self.lambda_hat, "minimal_unstable_mode": self.minimal_unstable_mode,
            "threshold": None if self.threshold is None else self.threshold.to_dict(),
            "within_bound": self.within_bound, "anomalies": list(self.anomalies),
            "flags": list(self.flags), "lambda_tol": self.lambda_tol,
            "stable_at_nonpositive": self.stable_at_nonpositive,
        }


def _certify_at(params: ProblemParams, lam: float, pair: SphericalEigenpair,
                config: MinimizeConfig, tolerance: float):
    p = params.with_lambda(lam)
    res = minimize_radial(p, config)
    if not res.converged:
        raise NotConverged(f"radial minimization did not converge at lambda = {lam}", res)
    return res, certify(res, p, pair, tolerance=tolerance, el_tolerance=max(config.el_tol, 1e-4))


def lambda_sweep(params: ProblemParams, lambdas: Sequence[float],
                 pairs: Optional[Sequence[SphericalEigenpair]] = None,
                 config: Optional[MinimizeConfig] = None, tolerance: float = 1e-4,
                 lambda_tol: float = 1e-2) -> SweepResult:
    """Certify the radial minimizer along ``lambdas`` for each eigenpair.

    The first eigenpair is the primary one: its threshold is compared with
    the onset. The onset of the earliest unstable mode is refined by
    bisection to width ``lambda_tol``; an inconclusive midpoint stops the
    bisection and is flagged.
    """
    config = config or MinimizeConfig()
    pairs = list(pairs) if pairs else [eigenpair_degree(params.k, l) for l in (1, 2, 3)]
    lambdas = sorted(float(l) for l in lambdas)
    rows: List[SweepRow] = []
    verdicts = {p.ell: [] for p in pairs}
    for lam in lambdas:
        p = params.with_lambda(lam)
        res = minimize_radial(p, config)
        if not res.converged:
            raise NotConverged(f"radial minimization did not converge at lambda = {lam}", res)
        for pair in pairs:
            c = certify(res, p, pair, tolerance=tolerance, el_tolerance=max(config.el_tol, 1e-4))
            rows.append(SweepRow(lam, pair.ell, pair.mu, c.q_u, c.q_tilde, c.margin,
                                 c.relative_margin, c.verdict, res.j, res.residual))
            verdicts[pair.ell].append(c.verdict)
    if all(r.verdict == "inconclusive" for r in rows):
        raise SweepInconclusive("every certificate in the sweep is inconclusive")

    anomalies: List[str] = []
    flags: List[str] = []
    onsets = {}
    for pair in pairs:
        v = verdicts[pair.ell]
        first = next((i for i, x in enumerate(v) if x == "unstable"), None)
        if first is None:
            onsets[pair.ell] = None
            continue
        for i in range(first + 1, len(v)):
            if v[i] != "unstable":
                anomalies.append(f"mode {pair.ell}: {v[i]} at lambda = {lambdas[i]} after onset")
        lo = lambdas[first - 1] if first > 0 else None
        if lo is not None and v[first - 1] != "stable":
            flags.append(f"mode {pair.ell}: point below onset is {v[first - 1]}")
        onsets[pair.ell] = (lo, lambdas[first])

    bracket = lambda_hat = min_mode = None
    candidates = [(hi, l) for l, b in onsets.items() if b is not None for hi in [b[1]]]
    if candidates:
        hi, min_mode = min(candidates)
        lo = onsets[min_mode][0]
        pair = next(p for p in pairs if p.ell == min_mode)
        if lo is not None:
            while hi - lo > lambda_tol:
                mid = 0.5 * (lo + hi)
                _, c = _certify_at(params, mid, pair, config, tolerance)
                if c.verdict == "unstable":
                    hi = mid
                elif c.verdict == "stable":
                    lo = mid
                else:
                    flags.append(f"inconclusive certificate at lambda = {mid}; bisection stopped")
                    break
            # a lower mode could become unstable inside the refined bracket
            for other in pairs:
                if other.ell != min_mode:
                    _, c = _certify_at(params, hi, other, config, tolerance)
                    if c.verdict == "unstable" and onsets.get(other.ell) is not None:
                        flags.append(f"mode {other.ell} also unstable at lambda = {hi}")
        bracket = (lo, hi)
        lambda_hat = hi

    thr = within = None
    if params.c_hat is not None:
        thr = threshold(params, pairs[0])
        if lambda_hat is not None:
            within = lambda_hat <= thr.lambda_bound
            if params.c_hat_note == "default" and not within:
                anomalies.append(f"onset {lambda_hat} exceeds the threshold {thr.lambda_bound}")
    nonpos = [r for r in rows if r.lam <= 0]
    stable_nonpos = all(r.verdict == "stable" for r in nonpos)
    if not stable_nonpos:
        anomalies.append("a certificate at lambda <= 0 is not stable")
    return SweepResult(rows, onsets, bracket, lambda_hat, min_mode, thr, within,
                       anomalies, flags, lambda_tol, stable_nonpos)


# ---------------------------------------------------------------------------
# sector comparison


def angular_dilation(field: PolarField, h: int) -> PolarField:
    """v(r, theta) = u(r, theta / h): mode ell becomes mode ell / h."""
    if field.n != 2:
        raise MinimizeError("angular dilation is defined for n = 2")
    if any(l % h for l in field.modes):
        raise MinimizeError(f"modes {field.modes} are not all multiples of h = {h}")
    if field.n_angular % h:
        raise MinimizeError(f"collocation size {field.n_angular} is not divisible by h = {h}")
    return PolarField(field.grid, 2, tuple(l // h for l in field.modes), field.coeffs.copy(),
                      None if field.sin_coeffs is None else field.sin_coeffs.copy(),
                      field.n_angular // h)


def _truncation_estimate(res: MinimizeResult) -> float:
    fr = res.mode_fractions or {}
    if not fr:
        return 0.0
    return res.j * fr[max(fr)]


@dataclass
class SectorComparison:
    t: int
    big_t: int
    h: int
    lam: float
    j_t: float
    j_vt: float
    j_big_t: float
    j_t_from_default: float
    error_t: float
    error_vt: float
    error_big_t: float
    hardy_rel_err: float
    lq_rel_err: float
    seminorm_big_t: float
    seminorm_vt: float
    nonradial_fraction: float
    residual_t: float
    residual_big_t: float

    @property
    def minimality_margin(self) -> float:
        return self.j_vt - self.j_t

    @property
    def strict_margin(self) -> float:
        return self.j_big_t - self.j_vt

    @property
    def error_estimate(self) -> float:
        return self.error_vt + self.error_big_t

    @property
    def minimal_ok(self) -> bool:
        return self.j_t <= self.j_vt

    @property
    def strict_ok(self) -> bool:
        return self.strict_margin > self.error_estimate

    def to_dict(self) -> dict:
        return dict(asdict(self), minimality_margin=self.minimality_margin,
                    strict_margin=self.strict_margin, error_estimate=self.error_estimate,
                    minimal_ok=self.minimal_ok, strict_ok=self.strict_ok)


def sector_compare(params: ProblemParams, t: int, h: int,
                   config: Optional[MinimizeConfig] = None,
                   radial_tol: float = 1e-8) -> SectorComparison:
    """Compare u_t, v_t (the dilation of u_T) and u_T for T = h t.

    u_t is computed twice, from the default start and from v_t, and the
    lower value is kept; descent from v_t alone guarantees J(u_t) <= J(v_t).
    Discretization errors are |J(refined) - J| plus the Hardy-mass share of
    the highest retained mode times J.
    """
    if h < 2:
        raise MinimizeError("h must be >= 2")
    config = config or MinimizeConfig()
    big_t = h * t
    top_big = config.max_mode or config.mode_factor * big_t
    top_big = (top_big // big_t) * big_t
    u_big = minimize_sector(params, big_t, config, max_mode=top_big)
    if not u_big.converged:
        raise NotConverged(f"u_{big_t} did not converge", u_big)
    nonradial = 1.0 - u_big.mode_fractions.get(0, 0.0)
    if nonradial < radial_tol:
        raise RadialCollapse(f"u_{big_t} is radial (non-radial mass {nonradial:.2e}); increase lambda")
    v_t = angular_dilation(u_big.field, h)
    top_t = top_big // h
    from_v = minimize_sector(params, t, config, initial=v_t, max_mode=top_t)
    default = minimize_sector(params, t, config, max_mode=top_t)
    for r in (from_v, default):
        if not r.converged:
            raise NotConverged(f"u_{t} did not converge", r)
    u_t = from_v if from_v.j <= default.j else default
    rep_v = energy_report(v_t, params)
    err = lambda res: discretization_error(res.field, params) + _truncation_estimate(res)
    err_v = discretization_error(v_t, params) + _truncation_estimate(u_big)
    return SectorComparison(
        t=t, big_t=big_t, h=h, lam=params.lam, j_t=u_t.j, j_vt=rep_v.j_lambda,
        j_big_t=u_big.j, j_t_from_default=default.j,
        error_t=err(u_t), error_vt=err_v, error_big_t=err(u_big),
        hardy_rel_err=abs(rep_v.hardy - u_big.report.hardy) / u_big.report.hardy,
        lq_rel_err=abs(rep_v.lq - u_big.report.lq) / u_big.report.lq,
        seminorm_big_t=u_big.report.seminorm, seminorm_vt=rep_v.seminorm,
        nonradial_fraction=nonradial, residual_t=u_t.residual, residual_big_t=u_big.residual,
    )
