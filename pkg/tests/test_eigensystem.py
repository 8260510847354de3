import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import pro_cv

from prolate.eigensystem import (ModeIndex, Normalization, SpectralState, action_J, alpha_of_sigma,
                                 coefficient_table, default_trunc, eigenvalue_oracle, lambda_asymptotic,
                                 log_norm_sq, norm_A, recurrence_coeffs, solve_sigma)
from prolate.errors import AdmissibilityError, DomainError

# lambda = chi - gamma^2 where chi is the classical prolate characteristic value
FROZEN_LAMBDA = {
    (0, 0, 1.0): -0.6809999448531071,
    (0, 2, 5.0): -4.823085279466731,
    (1, 3, 10.0): -52.69848452340738,
    (2, 5, 20.0): -262.1744472509742,
    (3, 7, 40.0): -1240.8823401066672,
}

modes = st.integers(0, 4).flatmap(lambda m: st.tuples(st.just(m), st.integers(m, m + 8)))


@pytest.mark.parametrize("key", sorted(FROZEN_LAMBDA))
def test_frozen_eigenvalues(key):
    m, n, g = key
    assert eigenvalue_oracle((m, n), g) == pytest.approx(FROZEN_LAMBDA[key], rel=1e-12)


@given(mode=modes, gamma=st.floats(0.1, 40.0))
def test_eigenvalue_matches_scipy_characteristic_value(mode, gamma):
    m, n = mode
    lam = eigenvalue_oracle(mode, gamma)
    assert lam == pytest.approx(pro_cv(m, n, gamma) - gamma ** 2, rel=1e-9, abs=1e-9)


@given(mode=modes)
def test_legendre_limit(mode):
    m, n = mode
    assert eigenvalue_oracle(mode, 0.0) == n * (n + 1)
    tab = coefficient_table(mode, 0.0)
    assert tab[0] == 1.0
    assert all(tab[k] == 0.0 for k in tab.ks if k != 0)


@given(m=st.integers(0, 3), n=st.integers(0, 10), gamma=st.floats(0.5, 30.0))
def test_eigenvalues_increase_with_n(m, n, gamma):
    if n < m:
        n = m
    assert eigenvalue_oracle((m, n), gamma) < eigenvalue_oracle((m, n + 1), gamma)


def test_mode_validation():
    with pytest.raises(AdmissibilityError, match="m <= n"):
        ModeIndex(3, 2)
    with pytest.raises(AdmissibilityError):
        ModeIndex(-1, 2)
    with pytest.raises(DomainError):
        eigenvalue_oracle((0, 0), -1.0)


def test_mode_bookkeeping():
    mode = ModeIndex(1, 4)
    assert (mode.k_minus, mode.k_plus, mode.l_min, mode.parity) == (1, 2, 2, -1)
    assert ModeIndex(2, 4).parity == 1


@given(mode=modes, gamma=st.floats(0.5, 30.0))
def test_coefficients_satisfy_recurrence(mode, gamma):
    tab = coefficient_table(mode, gamma)
    big = max(abs(a) for a in tab.values)
    for k in list(tab.ks)[:6]:
        A, B, C = recurrence_coeffs(mode, k, gamma)
        r = A * tab[k - 1] + (tab.lam + B) * tab[k] + C * tab[k + 1]
        assert abs(r) < 1e-9 * big * max(1.0, abs(tab.lam), gamma ** 2)


@given(mode=modes, gamma=st.floats(0.5, 30.0))
def test_coefficient_normalization(mode, gamma):
    tab = coefficient_table(mode, gamma)
    m, n = mode
    assert tab.norm_sum() == pytest.approx(math.exp(log_norm_sq(n, m)), rel=1e-10)
    assert tab[0] > 0


def test_unit_vector_normalization():
    tab = coefficient_table((1, 3), 7.0, normalization=Normalization.UNIT_VECTOR)
    assert np.linalg.norm(tab.as_array()) == pytest.approx(1.0, rel=1e-12)


def test_truncation_doubling_stable():
    mode, g = (1, 3), 12.0
    t1 = coefficient_table(mode, g, trunc=default_trunc(mode, g))
    t2 = coefficient_table(mode, g, trunc=2 * default_trunc(mode, g))
    assert max(abs(t1[k] - t2[k]) for k in t1.ks) < 1e-10


def test_norm_A_frozen():
    # cross-checked against the 50-digit table
    assert norm_A(coefficient_table((1, 3), 5.0)) == pytest.approx(-3.7567949367821063, rel=1e-12)


def test_action_endpoints():
    assert action_J(0.0) == pytest.approx(0.0, abs=1e-12)
    assert action_J(1.0) == pytest.approx(1.0, abs=1e-12)


@given(s=st.floats(0.0, 0.999))
def test_action_increasing(s):
    assert action_J(s + 1e-3) > action_J(s)


@given(mode=modes, gamma=st.floats(20.0, 200.0))
def test_solve_sigma_root(mode, gamma):
    m, n = mode
    try:
        sigma = solve_sigma(mode, gamma)
    except AdmissibilityError:
        return
    assert gamma * action_J(sigma) == pytest.approx((n - m + 0.5) * math.pi / 2, rel=1e-12)
    assert 0 <= sigma < 1


def test_admissibility_band():
    with pytest.raises(AdmissibilityError):
        solve_sigma((0, 30), 20.0, delta=0.05)


def test_spectral_state_consistency():
    st_ = SpectralState.asymptotic((0, 2), 50.0)
    assert st_.lam == pytest.approx(lambda_asymptotic((0, 2), 50.0))
    assert st_.alpha == pytest.approx(alpha_of_sigma(st_.sigma))
    assert SpectralState.from_lambda(50.0, st_.lam).sigma == pytest.approx(st_.sigma, rel=1e-12)
    with pytest.raises(AdmissibilityError):
        SpectralState.from_lambda(10.0, 5.0)
    with pytest.raises(AdmissibilityError):
        SpectralState.oracle((0, 0), 50.0, sigma0=0.01)


def test_asymptotic_eigenvalue_close_to_oracle():
    for g in (40.0, 80.0):
        diff = lambda_asymptotic((0, 2), g) - eigenvalue_oracle((0, 2), g)
        assert abs(diff) < 2.0
