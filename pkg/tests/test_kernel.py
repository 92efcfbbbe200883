import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import quad_kernel, quad_kernel_angle
from rhbm.kernel import KernelTable, angular_connection_kernel, integral_constant, linear_kernel_limit

R = 3000 / (2 * math.pi)


def mp_kernel(a, beta, R):
    X = mpmath.pi * R / a
    mpmath.mp.dps = 40
    val = mpmath.quad(lambda t: 1 / (1 + t**beta), [0, 1, X] if X > 1 else [0, X])
    return float(val / X)


def test_midpoint_value_beta_two():
    assert angular_connection_kernel(math.pi * R, 2.0, R) == pytest.approx(math.pi / 4, rel=1e-14)


def test_saturates_for_large_scale():
    assert angular_connection_kernel(1e12 * R, 3.0, R) == pytest.approx(1.0, abs=1e-12)
    assert angular_connection_kernel(1e300, 2.5, R) == 1.0


def test_zero_scale_gives_zero():
    assert angular_connection_kernel(0.0, 2.0, R) == 0.0


@pytest.mark.parametrize("beta", [1.0, 0.5, -2.0])
def test_rejects_beta_at_most_one(beta):
    with pytest.raises(ValueError):
        angular_connection_kernel(1.0, beta, R)


def test_scalar_in_scalar_out():
    assert isinstance(angular_connection_kernel(2.0, 2.0, R), float)
    assert angular_connection_kernel(np.ones(3), 2.0, R).shape == (3,)


def test_beta_two_matches_arctan():
    a = np.logspace(-3, 3, 100) * math.pi * R
    X = math.pi * R / a
    np.testing.assert_allclose(angular_connection_kernel(a, 2.0, R), np.arctan(X) / X, rtol=1e-8)


@pytest.mark.parametrize("beta", [1.1, 1.5, 2.5, 3.0, 5.0, 10.0, 40.0])
def test_matches_high_precision_quadrature(beta):
    for X in [1e-6, 1e-2, 0.5, 1.0, 2.0, 30.0, 1e4, 1e8]:
        a = math.pi * R / X
        assert angular_connection_kernel(a, beta, R) == pytest.approx(mp_kernel(a, beta, R), rel=1e-12)


@pytest.mark.parametrize("beta", [1.5, 2.0, 3.0, 7.0])
def test_two_quadrature_forms_agree_with_kernel(beta):
    for X in [0.1, 1.0, 4.0, 50.0]:
        a = math.pi * R / X
        g = angular_connection_kernel(a, beta, R)
        assert g == pytest.approx(quad_kernel(a, beta, R), rel=1e-9)
        assert g == pytest.approx(quad_kernel_angle(a, beta, R), rel=1e-9)


def test_integral_constant():
    assert integral_constant(2.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert integral_constant(4.0) == pytest.approx(math.pi / (2 * math.sqrt(2)), rel=1e-14)


@pytest.mark.parametrize("beta", [2.0, 3.0, 10.0])
def test_linear_regime(beta):
    a = np.logspace(-6, 0, 50) * math.pi * R / 100
    g = angular_connection_kernel(a, beta, R)
    lin = linear_kernel_limit(a, beta, R)
    assert np.all(np.abs(g - lin) <= 0.01 * np.abs(lin))


@pytest.mark.parametrize("beta", [1.2, 1.5, 2.0, 4.0])
def test_linear_regime_tail_bound(beta):
    # the missing tail of the integral beyond X is below X**(1 - beta) / (beta - 1)
    X = np.logspace(1, 8, 30)
    a = math.pi * R / X
    rel = 1 - angular_connection_kernel(a, beta, R) / linear_kernel_limit(a, beta, R)
    bound = X ** (1 - beta) / (beta - 1) / integral_constant(beta)
    assert np.all(rel >= -1e-12)
    assert np.all(rel <= bound * (1 + 1e-9) + 1e-12)


@settings(max_examples=100, deadline=None)
@given(beta=st.floats(1.05, 50.0), lo=st.floats(-12, 12), hi=st.floats(-12, 12))
def test_monotone_and_bounded(beta, lo, hi):
    lo, hi = sorted((lo, hi))
    a = math.pi * R * np.exp(np.linspace(lo, hi, 40))
    g = angular_connection_kernel(a, beta, R)
    assert np.all((g >= 0) & (g <= 1))
    assert np.all(np.diff(g) >= -1e-15)


@pytest.mark.parametrize("beta", [1.3, 2.0, 5.0, 10.0])
def test_table_tracks_exact_kernel(beta):
    table = KernelTable(beta, R)
    a = math.pi * R * np.exp(np.random.default_rng(0).uniform(-35, 20, 5000))
    np.testing.assert_allclose(table(a), angular_connection_kernel(a, beta, R), rtol=1e-4)
    assert table(np.array([0.0]))[0] == 0.0
