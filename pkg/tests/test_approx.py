import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prolate.approx import (FIXEDN_MAX_N, Anchoring, EvalResult, Evaluator, Regime, RegimePartition,
                            evaluate_angular, evaluate_radial, log_q)
from prolate.errors import AdmissibilityError, DomainError
from prolate.oracle import angular_series, radial_series
from prolate.eigensystem import SpectralState


@pytest.fixture(scope="module")
def ev02():
    return Evaluator((0, 2), 40.0)


@pytest.fixture(scope="module")
def ev13():
    return Evaluator((1, 3), 40.0)


def test_partition_defaults_and_validation():
    p = RegimePartition()
    assert p.delta0 == pytest.approx(0.025)
    assert RegimePartition(sigma0=0.8).delta0 == pytest.approx(0.05)
    for bad in (dict(delta0=0.2), dict(sigma0=1.0), dict(delta=0.0), dict(delta0=-0.01)):
        with pytest.raises(DomainError):
            RegimePartition(**bad)


@given(v=st.floats(-1e6, 1e6).filter(lambda v: v != 0.0))
def test_eval_result_log_form_consistent(v):
    r = EvalResult.from_value(0.5, v, Regime.PC_ANGULAR, 1.0, 1.0)
    assert r.sign * math.exp(r.log_magnitude) == pytest.approx(v, rel=1e-14)
    r2 = EvalResult.from_log(0.5, r.log_magnitude, r.sign, Regime.PC_ANGULAR, 1.0, 1.0)
    assert r2.value == pytest.approx(v, rel=1e-14)


def test_overflowed_log_form_keeps_magnitude():
    r = EvalResult.from_log(3.0, 800.0, -1, Regime.LG_RADIAL, 1.0, 1.0)
    assert r.value == -math.inf and r.log_magnitude == 800.0


@given(x=st.floats(0.0, 0.999))
def test_parity_exact(ev02, ev13, x):
    for ev in (ev02, ev13):
        assert ev.angular(-x).value == ev.mode.parity * ev.angular(x).value


def test_odd_mode_zero_at_origin():
    ev = Evaluator((1, 2), 40.0)
    r = ev.angular(0.0)
    assert r.value == 0.0 and r.sign == 0
    assert ev.angular(-0.3).value == -ev.angular(0.3).value


def test_regime_selection(ev02):
    d0 = ev02.partition.delta0
    assert ev02.angular(0.5).regime is Regime.PC_ANGULAR
    assert ev02.angular(1 - d0 / 2).regime is Regime.BESSELI_ANGULAR
    assert ev02.angular(0.5, "fixedn").regime is Regime.PC_FIXEDN
    assert ev02.radial(1.5).regime is Regime.BESSEL_RADIAL
    assert ev02.radial(1.5, "lg").regime is Regime.LG_RADIAL


def test_domain_errors(ev02):
    with pytest.raises(DomainError):
        ev02.angular(1.0)
    with pytest.raises(DomainError):
        ev02.radial(0.5)
    with pytest.raises(DomainError):
        ev02.angular(0.3, "bogus")
    with pytest.raises(DomainError):
        Evaluator((0, 0), 0.0)


def test_fixedn_rejects_large_n():
    ev = Evaluator((0, FIXEDN_MAX_N + 2), 120.0)
    with pytest.raises(AdmissibilityError):
        ev.angular(0.3, "fixedn")


@pytest.mark.parametrize("x", [0.05, 0.3, 0.6, 0.9, 0.99])
def test_angular_error_within_estimate(ev02, ev13, x):
    for ev in (ev02, ev13):
        r = ev.angular(x)
        err = abs(r.value - angular_series(ev.mode, ev.gamma, x).value)
        assert err < r.err_estimate
        assert err < 0.05 * r.scale


@pytest.mark.parametrize("x", [1.05, 1.2, 2.0, 4.0])
@pytest.mark.parametrize("method", ["bessel", "lg"])
def test_radial_error_within_estimate(ev02, ev13, x, method):
    if method == "lg" and x < 1 + ev02.partition.delta:
        return
    for ev in (ev02, ev13):
        r = ev.radial(x, method)
        err = abs(r.value - radial_series(ev.mode, ev.gamma, x).value)
        assert err < r.err_estimate


def test_fixedn_accuracy():
    ev = Evaluator((0, 2), 80.0)
    for x in (0.1, 0.4, 0.7):
        r = ev.angular(x, "fixedn")
        err = abs(r.value - angular_series((0, 2), 80.0, x).value)
        assert err < r.err_estimate


def test_corrected_q_matches_constants():
    # c ~ d q^(1/2) holds with the corrected q; the alternative is off by sqrt(2 gamma)
    for mode, g in (((0, 2), 40.0), ((1, 3), 40.0)):
        ev = Evaluator(mode, g)
        ratio = ev.c / (ev.d * math.exp(0.5 * ev.log_q))
        assert ratio == pytest.approx(1.0, abs=0.03)
        lit = ev.c / (ev.d * math.exp(0.5 * log_q(g, ev.spectral, literal=True)))
        assert lit == pytest.approx(math.sqrt(2 * g) * ratio, rel=1e-10)


@pytest.mark.parametrize("mode", [(0, 2), (1, 3), (0, 1)])
def test_asymptotic_anchoring_close_to_oracle(mode):
    eo = Evaluator(mode, 60.0)
    ea = Evaluator(mode, 60.0, anchoring=Anchoring.ASYMPTOTIC)
    for name in ("c", "d", "V"):
        assert getattr(ea, name) == pytest.approx(getattr(eo, name), rel=0.03)
    k = ea.constants()
    assert k.anchoring is Anchoring.ASYMPTOTIC and k.q == pytest.approx(math.exp(ea.log_q))


def test_asymptotic_spectral_source():
    ev = Evaluator((0, 2), 60.0, spectral_source="asymptotic")
    r = ev.angular(0.4)
    err = abs(r.value - angular_series((0, 2), 60.0, 0.4).value)
    assert err < r.err_estimate


def test_wrappers():
    a = evaluate_angular(0.4, (0, 2), 40.0)
    b = evaluate_radial(2.0, (0, 2), 40.0, method="lg")
    assert a.regime is Regime.PC_ANGULAR and b.regime is Regime.LG_RADIAL


@pytest.mark.parametrize("g", [10.0, 50.0])
def test_log_q_small_sigma_limit(g):
    # sigma -> 0: the outer action tends to 1 and alpha to 0
    state = SpectralState.from_lambda(g, -g * g * (1.0 - 1e-12))
    lit = log_q(g, state, literal=True)
    assert lit == pytest.approx(0.5 * math.log(math.pi ** 2 / (2 * g)) - 2 * g, abs=1e-5)
    assert log_q(g, state) - lit == pytest.approx(math.log(2 * g), rel=1e-12)


def test_log_q_finite_for_ground_mode():
    assert math.isfinite(log_q(50.0, SpectralState.oracle((0, 0), 50.0)))
