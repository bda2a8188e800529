import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import gamma

from ckn_symbreak.constants import cs_constant, gamma_constant
from ckn_symbreak.corpus import corpus, profile
from ckn_symbreak.energy import hardy_integral, seminorm
from ckn_symbreak.errors import ExtensionError
from ckn_symbreak.extension import (
    HeightGrid,
    bessel_energy_integral,
    boundary_term,
    cs_extend,
    dirichlet_energy,
    dirichlet_energy_factorized,
    extension_multiplier,
    extension_multiplier_minus_one,
    g_algebra_check,
    halfplane_hardy,
    perturbed_extension_gap,
    slice_hardy_check,
)
from ckn_symbreak.spectral import PolarField, RadialProfile
from ckn_symbreak.spherical import eigenpair_degree


def test_multiplier_half_is_exponential():
    t = np.logspace(-6, 2, 50)
    assert_allclose(extension_multiplier(0.5, t), np.exp(-t), rtol=1e-13)
    for s in (0.25, 0.75):
        assert extension_multiplier(s, np.array([0.0]))[0] == 1.0
        # 1 - psi_s(t) ~ Gamma(1-s)/Gamma(1+s) (t/2)^{2s} near 0
        lead = gamma(1 - s) / gamma(1 + s) * (0.5e-12) ** (2 * s)
        assert_allclose(-extension_multiplier_minus_one(s, np.array([1e-12]))[0], lead, rtol=1e-4)
        assert extension_multiplier(s, np.array([800.0]))[0] == 0.0
        tt = np.array([1e-3, 0.1, 0.9])
        assert_allclose(extension_multiplier_minus_one(s, tt), extension_multiplier(s, tt) - 1, rtol=1e-10)


@pytest.mark.parametrize("s", [0.1, 0.25, 0.5, 0.75, 0.9])
def test_bessel_integral(s):
    assert_allclose(bessel_energy_integral(s) * cs_constant(s), 1.0, rtol=1e-6)


def test_trace_recovery(gaussian4):
    ext = cs_extend(gaussian4, 0.25)
    w0 = ext.values([0.0])[0]
    keep = gaussian4.grid.nodes < 30
    assert_allclose(w0[keep], gaussian4.values[keep], atol=1e-13)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_quad_d_gaussian(n, s):
    u = profile("gaussian", n)
    ext = cs_extend(u, s)
    d = dirichlet_energy(ext)
    assert_allclose(cs_constant(s) * d, seminorm(u, s), rtol=1e-3)
    assert_allclose(dirichlet_energy_factorized(ext), d, rtol=1e-6)


def test_dirichlet_scaling():
    n, s, beta = 3, 0.5, np.exp(0.5)
    base = profile("exponential", n)
    grid = base.grid
    scaled = RadialProfile.from_function(lambda r: np.exp(-beta * r) * (1 + beta * r), grid, n)
    d1 = dirichlet_energy(cs_extend(base, s))
    d2 = dirichlet_energy(cs_extend(scaled, s))
    assert_allclose(d2, beta ** (2 * s - n) * d1, rtol=1e-8)


def test_slice_checks_n4():
    for u in corpus(4).values():
        ext = cs_extend(u, 0.5)
        for y in (0.1, 1.0, 10.0):
            c = slice_hardy_check(ext, y, 1.0)
            assert c.lhs <= c.rhs * (1 + 1e-6)
    ext = cs_extend(profile("gaussian", 4), 0.5)
    far = slice_hardy_check(ext, 1e6)
    assert far.lhs < 1e-11 and far.rhs < 1e-11
    # y -> 0: both sides approach int |u|^2/|x|^2
    near = [slice_hardy_check(ext, y) for y in (1e-2, 1e-4)]
    assert abs(near[1].lhs / near[1].rhs - 1) < abs(near[0].lhs / near[0].rhs - 1)
    with pytest.raises(ExtensionError):
        slice_hardy_check(ext, 0.0)


def test_halfplane_hardy():
    for s in (0.25, 0.5, 0.75):
        u = profile("algebraic", 4)
        ext = cs_extend(u, s)
        assert halfplane_hardy(ext) <= gamma_constant(s) * hardy_integral(u, s) * (1 + 1e-6)
    u = profile("gaussian", 4)
    ext2 = cs_extend(RadialProfile(u.grid, 3 * u.values, 4), 0.5)
    assert_allclose(halfplane_hardy(ext2), 9 * halfplane_hardy(cs_extend(u, 0.5)), rtol=1e-12)


def test_tail_bump_far_field():
    u = profile("tail_bump", 4)
    ext = cs_extend(u, 0.5)
    ratio = halfplane_hardy(ext) / hardy_integral(u, 0.5)
    assert ratio < 0.5 * gamma_constant(0.5)


def test_ws_hardy():
    for n, s in ((3, 0.5), (4, 0.25)):
        for u in corpus(n).values():
            ext = cs_extend(u, s)
            assert dirichlet_energy(ext) >= ((n - 2 * s) / 2) ** 2 * halfplane_hardy(ext)


def test_boundary_terms_vanish(gaussian4):
    ext = cs_extend(gaussian4, 0.5)
    b = np.abs(boundary_term(ext, [1e-16, 1e-8, 1.0, 1e4, 1e7]))
    assert b[0] < 1e-10 * b[2] and b[-1] < 1e-6 * b[2]


@pytest.mark.parametrize("n,s,ell", [(4, 0.5, 1), (4, 0.25, 2), (2, 0.75, 2), (3, 0.5, 1)])
def test_gap_inequality(n, s, ell):
    u = profile("gaussian", n)
    ext = cs_extend(u, s)
    gap = perturbed_extension_gap(ext, eigenpair_degree(n, ell), 1)
    assert gap.gap <= gap.bound and gap.margin > 0
    assert_allclose(gap.ibp_direct, gap.ibp_closed, rtol=1e-8)
    exact = seminorm(PolarField.from_profile(u, ell), s) - seminorm(u, s)
    assert exact <= cs_constant(s) * gap.gap


@pytest.mark.parametrize("k,m", [(4, 1), (2, 2)])
@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_g_algebra(k, m, s):
    chk = g_algebra_check(eigenpair_degree(k, 1), m, s, points=100, step=1e-4, seed=0)
    assert chk.max_rel_error < 1e-4


def test_height_grid():
    hg = HeightGrid()
    assert hg.heights.size == 512
    assert_allclose([hg.heights[0], hg.heights[-1]], [1e-24, 1e8], rtol=1e-12)
    assert hg.coarsened().nodes < hg.nodes
