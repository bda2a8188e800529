"""Acceptance criteria 1-10. Each test records one PASS/FAIL line, printed in
the pytest terminal summary (and directly when run as a script)."""
import io
import json
import time

import numpy as np
import pytest

from ckn_symbreak.checks import (
    algebra_suite,
    constants_suite,
    extension_suite,
    halfline_suite,
    lemma_suite,
)
from ckn_symbreak.cli import run
from ckn_symbreak.constants import breaking_threshold, hardy_constant, validate_params
from ckn_symbreak.energy import el_residual
from ckn_symbreak.minimize import MinimizeConfig, lambda_sweep, multistart_radial, sector_compare
from ckn_symbreak.perturb import certify
from ckn_symbreak.spherical import eigenpair_degree

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

# tolerances and budgets pinned from the acceptance criteria
RADIAL_EL_TOL = 1e-4
MULTISTART_RTOL = 1e-4
BUDGET = {1: 1, 2: 1, 3: 30, 4: 30, 5: 120, 6: 10, 7: 300, 8: 900, 9: 1200, 10: 60}


def _record(num, title, ok, elapsed, detail=""):
    within = elapsed <= BUDGET[num]
    status = "PASS" if ok and within else "FAIL"
    line = f"criterion {num}: {status}  {title}  ({elapsed:.1f} s / budget {BUDGET[num]} s){detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert within, line


def _rows_ok(rows):
    bad = [r for r in rows if not r.passed]
    return not bad, f"  rows={len(rows)} failed={len(bad)}" + (f" first={bad[0].check}" if bad else "")


def test_criterion_1_constants():
    t0 = time.perf_counter()
    rows = constants_suite()
    ok, detail = _rows_ok(rows)
    ok &= len([r for r in rows if r.check.startswith("gamma")]) == 9
    ok &= all(r.tolerance == 1e-12 for r in rows if r.check.startswith(("gamma", "c_mu")))
    _record(1, "gamma, C_1/2 and c_mu forms", ok, time.perf_counter() - t0, detail)


def test_criterion_2_halfline():
    t0 = time.perf_counter()
    rows = halfline_suite()
    ok, detail = _rows_ok(rows)
    ok &= len(rows) == 27 and all(r.tolerance == 1e-6 for r in rows)
    _record(2, "half-line weight identity on a 9 x 3 grid", ok, time.perf_counter() - t0, detail)


def test_criterion_3_quad_d():
    t0 = time.perf_counter()
    rows = []
    for n in (2, 3, 4):
        for s in (0.25, 0.5, 0.75):
            rows += [r for r in extension_suite(n, s, profiles=("gaussian",), ys=())
                     if r.check.startswith(("quad_D", "I_s"))]
    ok, detail = _rows_ok(rows)
    quad = [r for r in rows if r.check.startswith("quad_D")]
    ok &= len(quad) == 27 and all(r.tolerance == 1e-3 for r in quad)
    worst = max(r.margin for r in quad)
    _record(3, "C_s * Dirichlet energy = seminorm", ok, time.perf_counter() - t0,
            f"{detail} worst_rel={worst:.1e}")


def test_criterion_4_slice_and_halfspace_hardy():
    t0 = time.perf_counter()
    rows = []
    for s in (0.25, 0.5, 0.75):
        rows += [r for r in extension_suite(4, s, quad_d_profiles=(), c_hat=1.0)
                 if r.check.startswith(("slice_hardy", "halfspace_hardy"))]
    ok, detail = _rows_ok(rows)
    ok &= len(rows) == 3 * 5 * 4
    _record(4, "slice Hardy (c_hat = 1) and half-space Hardy (gamma)", ok, time.perf_counter() - t0, detail)


def test_criterion_5_normal_identities_and_gap_chain():
    t0 = time.perf_counter()
    rows = lemma_suite(4, 0.5) + lemma_suite(3, 0.5)
    ok, detail = _rows_ok(rows)
    ok &= len(rows) == 2 * 5 * 2 * 4
    _record(5, "normal identities and gap chain at m = 1", ok, time.perf_counter() - t0, detail)


def test_criterion_6_g_algebra():
    t0 = time.perf_counter()
    rows = algebra_suite()
    ok, detail = _rows_ok(rows)
    worst = max(r.lhs for r in rows)
    _record(6, "finite-difference operator on the block factor", ok, time.perf_counter() - t0,
            f"{detail} worst_rel={worst:.1e}")


def test_criterion_7_radial_minimizer():
    t0 = time.perf_counter()
    base = validate_params(4, 0.5, 2.5)
    hs = hardy_constant(4, 0.5)
    ok, parts = True, []
    for lam in (0.0, 5.0, 12.0):
        p = base.with_lambda(lam)
        runs = multistart_radial(p, starts=5)
        js = np.array([r.j for r in runs])
        spread = (js.max() - js.min()) / js.min()
        resid = max(el_residual(r.field, p) for r in runs)
        hardy_ok = all(r.report.seminorm >= hs * r.report.hardy for r in runs)
        conv = all(r.converged for r in runs)
        ok &= conv and resid <= RADIAL_EL_TOL and spread <= MULTISTART_RTOL and hardy_ok
        parts.append(f"lam={lam:g}: J={js.min():.10f} spread={spread:.1e} el={resid:.1e}")
    _record(7, "radial minimizer quality", ok, time.perf_counter() - t0, "  " + "; ".join(parts))


def test_criterion_8_symmetry_breaking():
    t0 = time.perf_counter()
    p = validate_params(4, 0.5, 2.5, c_hat=1.0)
    pair = eigenpair_degree(4, 1)
    bound = breaking_threshold(p, pair.mu)
    res = lambda_sweep(p, [0.0, 1.0, 2.0, 4.0, 8.0, bound], [pair])
    at0 = [r for r in res.rows if r.lam == 0.0][0]
    unstable = [r for r in res.rows if r.verdict == "unstable" and r.lam <= bound]
    lo, hi = res.bracket
    ok = (pair.mu == 3.0 and at0.verdict == "stable" and bool(unstable)
          and 0.0 < hi <= bound and lo >= 0.0 and hi - lo <= res.lambda_tol)
    _record(8, "certificate stable at 0 and unstable below 4 pi - H_s", ok, time.perf_counter() - t0,
            f"  bracket=({lo:.6g}, {hi:.6g}] bound={bound:.6f}")


def test_criterion_9_sector_multiplicity():
    t0 = time.perf_counter()
    p = validate_params(2, 0.5, 3.0, lam=1.5)
    cfg = MinimizeConfig(mode_factor=32)
    runs = multistart_radial(p, cfg, starts=1)
    cert = certify(runs[0], p, eigenpair_degree(2, 2))
    cmp = sector_compare(p, 1, 2, cfg)
    ok = cert.verdict == "unstable" and cmp.minimal_ok and cmp.strict_ok
    ok &= cmp.strict_margin > cmp.error_estimate
    _record(9, "J(u_1) <= J(v_1) < J(u_2) at n = 2", ok, time.perf_counter() - t0,
            f"  J(u1)={cmp.j_t:.10f} J(v1)={cmp.j_vt:.10f} J(u2)={cmp.j_big_t:.10f}"
            f" margin={cmp.strict_margin:.3e} err={cmp.error_estimate:.1e}")


def _cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue()


def test_criterion_10_determinism(tmp_path):
    t0 = time.perf_counter()
    argv = ["sweep", "--n", "4", "--s", "0.5", "--q", "2.5", "--lambdas", "0,1,2", "--mode", "1,2",
            "--seed", "7"]
    (c1, j1), (c2, j2) = _cli(argv), _cli(argv)
    ok = c1 == c2 == 0 and j1 == j2 and len(j1) > 0
    ra = ["minimize-radial", "--n", "4", "--s", "0.5", "--q", "2.5", "--lambda", "5", "--seed", "3"]
    _cli(ra + ["--out", str(tmp_path / "a")])
    _cli(ra + ["--out", str(tmp_path / "b")])
    for name in ("minimize-radial.json", "minimize-radial.csv", "config.txt"):
        ok &= (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    json.loads(j1)
    _record(10, "byte-identical JSON for identical config and seed", ok, time.perf_counter() - t0)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
