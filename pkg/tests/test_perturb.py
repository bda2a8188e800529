import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ckn_symbreak.constants import hardy_constant, validate_params
from ckn_symbreak.corpus import corpus, profile
from ckn_symbreak.energy import hardy_integral, seminorm
from ckn_symbreak.errors import (
    CHatUnjustified,
    FullGroupRejected,
    NonRadialSource,
    PartitionMismatch,
    UnconvergedInput,
)
from ckn_symbreak.perturb import (
    build_perturbed,
    certify,
    energy_gap,
    normal_identities,
    threshold,
)
from ckn_symbreak.spectral import PolarField
from ckn_symbreak.spherical import SymmetryGroup, eigenpair_degree


def test_single_mode_field(gaussian4):
    pert = build_perturbed(gaussian4, eigenpair_degree(4, 1))
    assert pert.m == 1 and pert.field.modes == (1,)
    # points at node radii so the radial interpolation is exact
    r = gaussian4.grid.nodes[[2040, 2060, 2070]]
    dirs = np.array([[0.3, 0.4, -0.2, 0.1], [1.0, 0.0, 0.0, 0.0], [-0.5, 0.5, 0.5, 0.5]])
    x = r[:, None] * dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    assert_allclose(pert(x), np.exp(-0.5 * r ** 2) * 2 * x[:, 0] / r, rtol=1e-12)
    assert_allclose(hardy_integral(pert.field, 0.5), hardy_integral(gaussian4, 0.5), rtol=1e-13)


def test_partition_errors(gaussian4):
    with pytest.raises(PartitionMismatch):
        build_perturbed(gaussian4, eigenpair_degree(3, 1))
    with pytest.raises(PartitionMismatch):
        build_perturbed(gaussian4, eigenpair_degree(2, 1), (2, 3))
    two = PolarField.from_modes(gaussian4.grid, 4, {0: gaussian4.values, 1: gaussian4.values})
    with pytest.raises(NonRadialSource):
        build_perturbed(two, eigenpair_degree(4, 1))


@pytest.mark.parametrize("n,partition,ell", [(4, None, 1), (4, None, 2), (3, None, 1), (4, (2, 2), 1),
                                              (4, (2, 2), 2), (6, (3, 2), 1)])
def test_normal_identities(n, partition, ell):
    p = validate_params(n, 0.5, 2.2)
    k = partition[0] if partition else n
    for u in corpus(n).values():
        ni = normal_identities(build_perturbed(u, eigenpair_degree(k, ell), partition), p)
        assert ni.cross_normalized < 1e-10
        assert ni.quad_rel_error < 1e-8


def test_gap_gaussian_n4(gaussian4, params4):
    gap = energy_gap(build_perturbed(gaussian4, eigenpair_degree(4, 1)), params4)
    assert_allclose(gap.bound, 2 * math.pi * hardy_integral(gaussian4, 0.5), rtol=1e-14)
    assert gap.holds and gap.margin > 0 and gap.chain_holds


def test_gap_chain_corpus():
    p = validate_params(3, 0.5, 2.5)
    for u in corpus(3, names=("ring", "two_scale")).values():
        gap = energy_gap(build_perturbed(u, eigenpair_degree(3, 2)), p)
        assert gap.chain_holds and gap.margin > 0


def test_extension_path_m2():
    p = validate_params(4, 0.5, 2.5, m=2, k=2, c_hat=1.0)
    u = profile("gaussian", 4)
    gap = energy_gap(build_perturbed(u, eigenpair_degree(2, 1), (2, 2)), p)
    assert gap.path == "extension" and gap.holds


def test_gap_trend_near_one():
    # the exact gap approaches mu * Hardy as s -> 1
    u = profile("gaussian", 4)
    field = PolarField.from_profile(u, 1)
    ratios = [(seminorm(field, s) - seminorm(u, s)) / hardy_integral(u, s) for s in (0.9, 0.99, 0.999)]
    assert ratios[0] < ratios[1] < ratios[2]
    assert_allclose(ratios[-1], 3.0, rtol=0.1)


def test_certify_generic_bump_rejected(gaussian4, params4):
    with pytest.raises(UnconvergedInput):
        certify(gaussian4, params4, eigenpair_degree(4, 1))


def test_threshold(params4):
    tb = threshold(params4, SymmetryGroup.trivial(4))
    assert_allclose(tb.lambda_bound, 4 * math.pi - hardy_constant(4, 0.5), rtol=1e-14)
    assert tb.mu == 3
    p2 = validate_params(2, 0.5, 3, c_hat=1.0)
    bounds = [threshold(p2, SymmetryGroup.cyclic(t)).lambda_bound for t in (2, 4, 8)]
    shift = hardy_constant(2, 0.5)
    assert_allclose((bounds[2] + shift) / (bounds[1] + shift), (64 + 1) / (16 + 1), rtol=1e-12)
    with pytest.raises(FullGroupRejected):
        threshold(params4, SymmetryGroup.orthogonal(4))
    with pytest.raises(CHatUnjustified):
        threshold(validate_params(2, 0.5, 3), SymmetryGroup.cyclic(2))
