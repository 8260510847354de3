import math

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prolate.eigensystem import action_J, alpha_of_sigma
from prolate.errors import DomainError
from prolate.maps import (Branch, Phi, Phi_prime, chi5, eta_abs, gap_action, inner_action, map_point,
                          outer_action, pc_prefactor_sq, rho, rising_action, xi, zeta, zeta_parts)

sigmas = st.floats(0.05, 0.95)


def _quad(f, a, b):
    with mp.workdps(30):
        return float(mp.quad(f, [a, b]))


@given(sigma=sigmas, frac=st.floats(0.0, 1.0))
def test_inner_and_gap_actions_split_J(sigma, frac):
    x = frac * sigma
    total = inner_action(x, sigma) + gap_action(x, sigma)
    assert total == pytest.approx(action_J(sigma), rel=1e-11, abs=1e-14)


@given(sigma=sigmas, frac=st.floats(0.0, 0.99))
def test_rising_plus_outer_action(sigma, frac):
    x = sigma + frac * (1 - sigma)
    full = rising_action(0.999999, sigma) + outer_action(0.999999, sigma)
    assert rising_action(x, sigma) + outer_action(x, sigma) == pytest.approx(full, rel=1e-10)


def test_xi_against_quadrature():
    sigma, x = 0.4, 2.0
    # t = cosh(u) removes the endpoint singularity
    ref = _quad(lambda u: mp.sqrt(mp.cosh(u) ** 2 - sigma ** 2), 0, mp.acosh(x))
    assert xi(x, sigma) == pytest.approx(ref, rel=1e-12)
    assert xi(1.0, sigma) == 0.0


def test_xi_large_x_offset():
    # xi(x) - x -> -J(sigma) as x grows, with a 1/x correction
    sigma = 0.6
    x = 1e4
    assert xi(x, sigma) - x == pytest.approx(-action_J(sigma), abs=1e-3)


def test_eta_near_pole_linear():
    sigma, h = 0.5, 1e-6
    assert eta_abs(1 + h, sigma) == pytest.approx(2 * (1 - sigma ** 2) * h, rel=1e-5)
    assert eta_abs(1 - h, sigma) == pytest.approx(2 * (1 - sigma ** 2) * h, rel=1e-5)


@given(sigma=sigmas, frac=st.floats(0.0, 0.98))
def test_zeta_defining_relation(sigma, frac):
    alpha = alpha_of_sigma(sigma)
    x = frac * sigma
    z = zeta(x, sigma, alpha)
    lhs = 0.5 * z * math.sqrt(max(alpha * alpha - z * z, 0.0)) + 0.5 * alpha * alpha * math.asin(min(z / alpha, 1.0))
    assert lhs == pytest.approx(inner_action(x, sigma), rel=1e-9, abs=1e-13)


def test_zeta_anchor_points():
    sigma = 0.7
    alpha = alpha_of_sigma(sigma)
    assert zeta(0.0, sigma, alpha) == 0.0
    assert zeta(sigma, sigma, alpha) == pytest.approx(alpha, rel=1e-10)
    assert alpha * alpha * math.pi / 4 == pytest.approx(action_J(sigma), rel=1e-14)


@given(sigma=sigmas, x=st.floats(0.0, 0.99))
def test_zeta_monotone_and_gap(sigma, x):
    alpha = alpha_of_sigma(sigma)
    z, gap = zeta_parts(x, sigma, alpha)
    z2 = zeta(min(x + 1e-4, 0.999), sigma, alpha)
    assert z2 > z
    assert gap == pytest.approx(alpha * alpha - z * z, abs=1e-10 * max(1.0, z * z))


@given(sigma=sigmas, x=st.floats(0.0, 0.95))
def test_zeta_derivative_matches_prefactor(sigma, x):
    alpha = alpha_of_sigma(sigma)
    h = 1e-6
    lo, hi = max(x - h, 0.0), x + h
    dz = (zeta(hi, sigma, alpha) - zeta(lo, sigma, alpha)) / (hi - lo)
    expected = 1.0 / (math.sqrt(pc_prefactor_sq(x, sigma, alpha)) * (1 - x * x))
    assert dz == pytest.approx(expected, rel=1e-5)


def test_rho_and_fixedn_terms():
    assert rho(0.6) == pytest.approx(math.sqrt(0.4), rel=1e-15)
    assert rho(0.0) == 0.0
    assert chi5(0.0, 2) == pytest.approx(3.375)
    assert Phi(0.0, 3.0) == 0.0
    r, a, h = 0.3, 2.5, 1e-6
    assert Phi_prime(r, a) == pytest.approx((Phi(r + h, a) - Phi(r - h, a)) / (2 * h), rel=1e-7)


@given(x=st.floats(0.0, 1.0))
def test_rho_squared_identity(x):
    with mp.workdps(40):
        ref = float(2 * mp.mpf(x) ** 2 / (1 + mp.sqrt(1 - mp.mpf(x) ** 2)))
    assert rho(x) ** 2 == pytest.approx(ref, rel=1e-14, abs=1e-300)


def test_domains():
    with pytest.raises(DomainError):
        xi(0.5, 0.3)
    with pytest.raises(DomainError):
        eta_abs(0.2, 0.3)
    with pytest.raises(DomainError):
        zeta(1.0, 0.5, alpha_of_sigma(0.5))
    with pytest.raises(DomainError):
        rho(1.5)


def test_map_point_dispatch():
    p = map_point(2.0, Branch.RADIAL_XI, sigma=0.4)
    assert p.branch is Branch.RADIAL_XI and p.value == pytest.approx(xi(2.0, 0.4))
