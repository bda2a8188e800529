import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ckn_symbreak.constants import (
    breaking_threshold,
    c_hat_justified,
    c_mu,
    c_mu_closed,
    constants_table,
    critical_exponent,
    cs_constant,
    gamma_constant,
    hardy_constant,
    sobolev_constant,
    validate_params,
)
from ckn_symbreak.errors import (
    BadFactorization,
    CHatUnjustified,
    LambdaBelowHardy,
    MuNonpositive,
    ParameterError,
    QOutOfRange,
)

# mpmath at 30 digits, from 2^{2s} Gamma((n+2s)/4)^2 / Gamma((n-2s)/4)^2 and
# the sharp Sobolev constant formula
HARDY_ORACLE = {
    (4, 0.5): 1.0942198076132383,
    (3, 0.5): 0.63661977236758134,
    (2, 0.5): 0.22847329052223181,
    (3, 0.25): 0.81597791751976742,
    (4, 0.75): 1.0860543196772349,
}
SOBOLEV_ORACLE = {
    (4, 0.5): 3.3974914968924907,
    (3, 0.5): 2.7025676900634902,
    (2, 0.5): 1.772453850905516,
    (4, 0.75): 6.0487091618679924,
}
# 1 / (mpmath quadrature of int t^{1-2s} (psi'^2 + psi^2) dt)
CS_ORACLE = {0.25: 2.0920992401062033, 0.5: 1.0, 0.75: 0.477988797486125}


def test_validate_examples():
    p = validate_params(4, 0.5, 2.5, lam=1, m=1, k=4)
    assert p.b == pytest.approx(0.1, abs=1e-15)
    assert p.critical == pytest.approx(8 / 3, rel=1e-15)
    assert validate_params(4, 0.75, 3).b == pytest.approx(1 / 12, abs=1e-15)
    with pytest.raises(QOutOfRange):
        validate_params(4, 0.5, 3)


@pytest.mark.parametrize("raw,err", [
    (dict(n=4, s=0.5, q=2.0), QOutOfRange),
    (dict(n=4, s=0.5, q=2.5, lam=-1.1), LambdaBelowHardy),
    (dict(n=4, s=0.5, q=2.5, m=3), BadFactorization),
    (dict(n=4, s=0.5, q=2.5, m=2, k=3), BadFactorization),
    (dict(n=2, s=0.5, q=3, c_hat="default"), CHatUnjustified),
    (dict(n=3, s=0.75, q=3, c_hat="default"), CHatUnjustified),
    (dict(n=4, s=1.0, q=2.5), ParameterError),
    (dict(n=4, s=0.5, q=float("nan")), ParameterError),
    (dict(n=4, s=0.5, q=2.5, c_hat=-1.0), ParameterError),
])
def test_validate_errors(raw, err):
    with pytest.raises(err):
        validate_params(**raw)


def test_b_positive_on_grid():
    for n in (2, 3, 4, 6):
        for s in (0.1, 0.5, 0.9):
            crit = critical_exponent(n, s)
            for q in np.linspace(2.01, crit - 0.01, 5):
                p = validate_params(n, s, q, c_hat=1.0)
                assert p.b > 0 and 2 < p.q < p.critical


def test_c_hat_regime():
    assert c_hat_justified(4, 0.9) and c_hat_justified(3, 0.5)
    assert not c_hat_justified(3, 0.6) and not c_hat_justified(2, 0.1)
    assert validate_params(2, 0.5, 3).c_hat is None
    assert validate_params(4, 0.5, 2.5).c_hat == 1.0
    assert validate_params(2, 0.5, 3, c_hat=0.7).c_hat == 0.7
    assert validate_params(2, 0.5, 3, c_hat=0.7).with_lambda(2.0).c_hat == 0.7
    with pytest.raises(CHatUnjustified):
        c_mu(validate_params(2, 0.5, 3), 1.0)


@pytest.mark.parametrize("ns", sorted(HARDY_ORACLE))
def test_hardy_oracle(ns):
    assert_allclose(hardy_constant(*ns), HARDY_ORACLE[ns], rtol=1e-14)


def test_hardy_limits():
    assert_allclose(hardy_constant(5, 1 - 1e-9), 9 / 4, rtol=1e-7)
    with pytest.raises(ParameterError):
        hardy_constant(1, 0.5)


@pytest.mark.parametrize("s", sorted(CS_ORACLE))
def test_cs_oracle(s):
    assert_allclose(cs_constant(s), CS_ORACLE[s], rtol=1e-14)


def test_cs_product_and_limit():
    assert_allclose(cs_constant(0.25) * cs_constant(0.75), 1.0, rtol=1e-14)
    # the closed form grows like 1/(2s) as s -> 0
    assert_allclose(cs_constant(1e-6) * 2e-6, 1.0, rtol=1e-5)


def test_gamma_examples():
    assert_allclose(gamma_constant(0.5, 1.0), math.pi / 2, rtol=1e-14)
    assert_allclose(gamma_constant(0.25, 1.0), math.pi / math.sqrt(2), rtol=1e-14)
    assert_allclose(gamma_constant(0.5, 2.0), math.pi, rtol=1e-14)
    for s in np.arange(1, 10) / 10:
        assert_allclose(gamma_constant(s), math.pi / (2 * math.sin(math.pi * s)), rtol=1e-12)


def test_c_mu_forms(params4):
    assert_allclose(c_mu(params4, 3.0), 2 * math.pi, rtol=1e-14)
    for n in (3, 5, 8):
        p = validate_params(n, 0.5, 2.2)
        assert_allclose(c_mu(p, n - 1.0), n * math.pi / 2, rtol=1e-13)
    for s in (0.1, 0.3, 0.5, 0.7, 0.9):
        for m in (1, 2, 3):
            p = validate_params(4 * m, s, 2.01, m=m, c_hat=1.3)
            for mu in (0.5, 3.0, 17.0):
                assert_allclose(c_mu(p, mu), c_mu_closed(s, m, mu, 1.3), rtol=1e-12)
    assert c_mu(params4, 4.0) > c_mu(params4, 3.0)
    with pytest.raises(MuNonpositive):
        c_mu(params4, 0.0)


def test_threshold(params4):
    assert_allclose(breaking_threshold(params4, 3.0), 4 * math.pi - HARDY_ORACLE[(4, 0.5)], rtol=1e-14)
    assert breaking_threshold(params4, 8.0) > breaking_threshold(params4, 3.0)
    near = validate_params(4, 0.5, 2.0001)
    assert breaking_threshold(near, 3.0) > 1e4


@pytest.mark.parametrize("ns", sorted(SOBOLEV_ORACLE))
def test_sobolev_oracle(ns):
    assert_allclose(sobolev_constant(*ns), SOBOLEV_ORACLE[ns], rtol=1e-14)


def test_table(params4):
    t = constants_table(params4, 3.0)
    assert_allclose(t.lambda_bound, 11.472150806745931, rtol=1e-14)
    assert min(t.hardy, t.cs, t.gamma, t.sobolev, t.c_mu) > 0
    t2 = constants_table(validate_params(2, 0.5, 3), 1.0)
    assert t2.c_mu is None and t2.gamma is None and t2.hardy > 0
