import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import gamma

from ckn_symbreak.constants import hardy_constant, sphere_area
from ckn_symbreak.errors import (
    ResolutionError,
    SingularIntegralError,
    SpectralError,
    TruncationError,
)
from ckn_symbreak.spectral import (
    PolarField,
    RadialGrid,
    RadialProfile,
    decay_rate,
    default_nodes,
    halfline_weight_integral,
    hankel_quadrature,
    hankel_transform,
    hardy_symbol,
    inverse_hankel,
    load_profile,
    save_profile,
    symbol_imaginary,
    weighted_norm,
)


def _random_profile(rng, grid, n):
    a = rng.uniform(0.3, 2.0, size=3)
    c = rng.uniform(0.2, 1.0, size=3)
    p = rng.integers(0, 3, size=3)
    return RadialProfile.from_function(
        lambda r: sum(ci * r ** (2 * pi) * np.exp(-ai * r ** 2) for ai, ci, pi in zip(a, c, p)), grid, n)


def test_default_grid(monkeypatch):
    monkeypatch.delenv("CKN_GRID_NODES", raising=False)
    assert default_nodes() == 4096
    monkeypatch.setenv("CKN_GRID_NODES", "1024")
    assert RadialGrid.default().size == 1024
    g = RadialGrid.from_bounds(1e-3, 1e3, 64)
    assert_allclose([g.r_min, g.r_max], [1e-3, 1e3], rtol=1e-13)
    assert g.refined(2).size == 128 and g.refined(2).dt == g.dt / 2


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_gaussian_self_transform(grid, n):
    u = RadialProfile.from_function(lambda r: np.exp(-0.5 * r ** 2), grid, n)
    spec = hankel_transform(u)
    rho = spec.grid.nodes
    # uniform absolute accuracy holds for the rho^{n/2}-weighted transform
    ref = np.exp(-0.5 * rho ** 2) * rho ** (n / 2)
    assert_allclose(spec.weighted, ref, atol=1e-13 * ref.max())


@pytest.mark.parametrize("n,ell", [(2, 0), (3, 1), (4, 2)])
def test_against_quadrature(grid, n, ell):
    func = lambda r: r ** ell * np.exp(-r ** 2) * (1 + r)
    u = RadialProfile.from_function(func, grid, n)
    spec = hankel_transform(u, ell)
    idx = np.searchsorted(spec.grid.nodes, [0.3, 1.0, 2.5, 4.0])
    ref = hankel_quadrature(func, spec.grid.nodes[idx], n, ell, r_cut=12.0)
    assert_allclose(spec.values[idx], ref, rtol=1e-9, atol=1e-13)


def test_involution(grid):
    u = RadialProfile.from_function(lambda r: r ** 2 * np.exp(-r) / (1 + r ** 2), grid, 3)
    back = inverse_hankel(hankel_transform(u, 1))
    w = grid.nodes ** 1.5
    assert_allclose(back.values * w, u.values * w, atol=1e-8 * np.max(np.abs(u.values * w)))


def test_plancherel(grid):
    rng = np.random.default_rng(0)
    for _ in range(10):
        n = int(rng.integers(2, 6))
        u = _random_profile(rng, grid, n)
        spec = hankel_transform(u)
        assert_allclose(sphere_area(n) * spec.l2_norm_squared(), weighted_norm(u, 0.0, 2.0), rtol=1e-8)


def test_transform_errors():
    grid = RadialGrid.from_bounds(1e-3, 10.0, 512)
    slow = RadialProfile.from_function(lambda r: 1 / (1 + r), grid, 2)
    with pytest.raises(TruncationError):
        hankel_transform(slow)
    fine = RadialGrid.from_bounds(1e-8, 1e8, 256)
    wiggly = RadialProfile.from_function(lambda r: np.exp(-r ** 2) * (1 + 0.5 * np.cos(200 * np.log(r))), fine, 4)
    with pytest.raises(ResolutionError):
        hankel_transform(wiggly)


@pytest.mark.parametrize("n,s", [(2, 0.25), (3, 0.5), (4, 0.75)])
def test_weighted_norm_closed_form(grid, n, s):
    u = RadialProfile.from_function(lambda r: np.exp(-0.5 * r ** 2), grid, n)
    ref = sphere_area(n) * gamma((n - 2 * s) / 2) / 2
    assert_allclose(weighted_norm(u, s, 2.0), ref, rtol=1e-12)
    assert_allclose(weighted_norm(RadialProfile(grid, 3 * u.values, n), s, 2.0), 9 * ref, rtol=1e-13)


def test_weighted_norm_bump(grid):
    u = RadialProfile.from_function(lambda r: np.exp(-0.5 * ((r - 100) / 0.5) ** 2), grid, 3)
    ratio = weighted_norm(u, 0.5, 2.0) / weighted_norm(u, 0.0, 2.0)
    assert_allclose(ratio, 100.0 ** -1, rtol=1e-3)


def test_weighted_norm_errors(grid):
    u = RadialProfile.from_function(lambda r: np.exp(-r), grid, 2)
    with pytest.raises(SingularIntegralError):
        weighted_norm(u, 0.5, 4.0)
    short = RadialGrid.from_bounds(1e-2, 5.0, 256)
    v = RadialProfile.from_function(lambda r: np.exp(-r), short, 3)
    with pytest.raises(TruncationError):
        weighted_norm(v, 0.0, 2.0)
    val, res = weighted_norm(v, 0.0, 2.0, with_residual=True, trunc_tol=None)
    assert res > 1e-6 * val


def test_halfline_values():
    assert_allclose(halfline_weight_integral(0.5, 1.0), math.pi / 2, rtol=1e-12)
    ref = math.pi / math.sin(math.pi / 4) * 2 ** -0.5 / 2
    assert_allclose(halfline_weight_integral(0.25, 2.0), ref, rtol=1e-12)
    for s in (0.1, 0.6):
        assert_allclose(halfline_weight_integral(s, 3.0), 3.0 ** (-2 * s) * halfline_weight_integral(s, 1.0),
                        rtol=1e-12)
    for s in np.arange(1, 10) / 10:
        for x in (0.5, 1.0, 2.0):
            ref = 0.5 * gamma(s) * gamma(1 - s) * x ** (-2 * s)
            assert_allclose(halfline_weight_integral(s, x), ref, rtol=1e-6)
    with pytest.raises(SingularIntegralError):
        halfline_weight_integral(0.5, 0.0)


def test_symbol():
    for n, s in ((2, 0.5), (4, 0.25), (3, 0.75)):
        assert_allclose(hardy_symbol(n, s, 0, 0.0), hardy_constant(n, s), rtol=1e-14)
        tau = np.linspace(0, 40, 50)
        assert np.all(np.diff(hardy_symbol(n, s, 0, tau)) > 0)
        assert np.all(hardy_symbol(n, s, 1, tau) > hardy_symbol(n, s, 0, tau))
        # |tau|^{2s} growth
        assert_allclose(hardy_symbol(n, s, 0, 1e6) / 1e6 ** (2 * s), 1.0, rtol=1e-3)


def test_decay_rate():
    # at lambda = 0 the linear solutions decay like r^{0} and r^{-(n-2s)}
    assert_allclose(decay_rate(4, 0.5, 0.0), 1.5, rtol=1e-12)
    for lam in (-0.5, 3.0, 12.0):
        y = decay_rate(4, 0.5, lam)
        assert_allclose(symbol_imaginary(4, 0.5, y) + lam, 0.0, atol=1e-10)
    assert decay_rate(4, 0.5, 12.0) > decay_rate(4, 0.5, 3.0)
    with pytest.raises(SpectralError):
        decay_rate(4, 0.5, -2.0)


def test_profile_io(tmp_path, gaussian4):
    for name in ("u.json", "u.txt"):
        save_profile(tmp_path / name, gaussian4)
        back = load_profile(tmp_path / name)
        assert back.n == 4 and back.grid.size == gaussian4.grid.size
        assert_allclose(back.values, gaussian4.values, rtol=1e-15, atol=0)
        assert_allclose(back.grid.log_nodes, gaussian4.grid.log_nodes, rtol=1e-12, atol=1e-12)


def test_polar_field(grid):
    u0 = np.exp(-grid.nodes ** 2)
    u2 = grid.nodes ** 2 * np.exp(-grid.nodes ** 2)
    f = PolarField.from_modes(grid, 2, {0: u0, 2: u2}, {2: 0.5 * u2}, n_angular=16)
    g = PolarField.from_samples(grid, f.node_values(), (0, 2))
    assert_allclose(g.coeffs, f.coeffs, atol=1e-15)
    assert_allclose(g.sin_coeffs, f.sin_coeffs, atol=1e-15)
    assert not f.is_radial
    fr = f.mode_energy_fractions(0.5)
    assert_allclose(sum(fr.values()), 1.0, rtol=1e-14)
    with pytest.raises(SpectralError):
        PolarField(grid, 2, (0, 5), np.zeros((2, grid.size)), n_angular=8)
