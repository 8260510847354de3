"""Double-precision special-function kernels.

Bessel J/Y/I come from :mod:`scipy.special`; the parabolic cylinder pair
U, Ubar is computed here by integrating Weber's equation

    w'' = (t**2/4 + a) w

in exponent-scaled variables, seeded with closed-form values at ``t = 0``
(for Ubar) and with the large-``t`` asymptotic series (for U).  Ubar follows
Olver's normalisation, Ubar(a, t) = Gamma(1/2 - a) V(a, t), so that

    Ubar(a, t) ~ sqrt(2/pi) Gamma(1/2 - a) t**(a - 1/2) exp(t**2/4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sp
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, OverflowRangeError

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
MAX_BESSEL_ORDER = 200
# |t| above which unscaled PC values are refused (exp(t^2/4) ~ 1e271)
PC_EXPONENT_GUARD = 50.0

log_gamma = math.lgamma


# ---------------------------------------------------------------------------
# quadrature

def _ts_nodes(level):
    """New abscissa complements and weights of the tanh-sinh rule at step 2**-level."""
    h = 2.0 ** -level
    k = np.arange(0, int(4.0 / h) + 1)
    if level > 0:
        k = k[k % 2 == 1]
    t = k * h
    e = np.exp(-math.pi * np.sinh(t))
    comp = 2.0 * e / (1.0 + e)                    # 1 - tanh(pi/2 sinh t)
    w = 2.0 * math.pi * np.cosh(t) * e / (1.0 + e) ** 2
    return comp, w


def _finite(values, x, end):
    bad = (x == end) | ~np.isfinite(values)
    if np.any(bad):
        values = np.where(bad, 0.0, values)
    return values


def tanh_sinh(f, a, b, tol=1e-14, max_level=10, distances=False):
    """Integrate ``f`` over ``[a, b]`` with the double-exponential rule.

    ``f`` must accept a numpy array.  With ``distances=True`` it is called as
    ``f(x, x - a, b - x)`` with both distances computed without cancellation,
    which lets integrands like ``(1 - t)**-0.5`` be resolved to machine
    precision.  Nodes that round onto an endpoint are skipped.
    """
    if a == b:
        return 0.0
    if b < a:
        return -tanh_sinh(f, b, a, tol, max_level, distances)
    half = 0.5 * (b - a)
    acc = 0.0
    prev = None
    for level in range(max_level + 1):
        comp, w = _ts_nodes(level)
        h = 2.0 ** -level
        xr = b - half * comp
        xl = a + half * comp
        if distances:
            dc = half * comp
            fr = _finite(np.asarray(f(xr, 2 * half - dc, dc), dtype=float), dc, 0.0)
            fl = _finite(np.asarray(f(xl, dc, 2 * half - dc), dtype=float), dc, 0.0)
        else:
            fr = _finite(np.asarray(f(xr), dtype=float), xr, b)
            fl = _finite(np.asarray(f(xl), dtype=float), xl, a)
        if level == 0:
            # t = 0 is the midpoint; count it once
            s = w[0] * fr[0] + np.dot(w[1:], fr[1:] + fl[1:])
            acc = h * s
        else:
            acc = 0.5 * acc + h * np.dot(w, fr + fl)
        value = half * float(acc)
        if prev is not None and level >= 3 and abs(value - prev) <= tol * max(abs(value), 1e-300):
            return value
        prev_prev, prev = prev, value
    if abs(value - prev_prev) <= 1e3 * tol * max(abs(value), 1e-300):
        return value
    raise ConvergenceError(f"tanh-sinh quadrature did not converge on [{a}, {b}]")


# ---------------------------------------------------------------------------
# elliptic integral

def elliptic_E(a, b):
    """Incomplete elliptic integral of the second kind in the form

        E(a; b) = int_0^a sqrt((1 - b^2 t^2) / (1 - t^2)) dt.

    Real results need ``|a| <= 1`` and, when ``b > 1``, ``|a| <= 1/b``.
    """
    if b < 0:
        raise DomainError("elliptic_E requires b >= 0")
    if a < 0:
        return -elliptic_E(-a, b)
    if a > 1.0 or (b > 1.0 and a * b > 1.0 + 1e-15):
        raise DomainError(f"elliptic_E({a}, {b}) is not real on the principal branch")
    if a == 0.0:
        return 0.0
    # t = sin(theta) removes the (1 - t^2)^(-1/2) endpoint singularity
    end = math.asin(a)
    b2 = b * b

    def f(th):
        s = np.sin(th)
        return np.sqrt(np.maximum(1.0 - b2 * s * s, 0.0))

    return tanh_sinh(f, 0.0, end)


# ---------------------------------------------------------------------------
# Bessel functions (scipy backed)

def _check_order(m):
    if m < 0 or m > MAX_BESSEL_ORDER:
        raise DomainError(f"Bessel order {m} outside [0, {MAX_BESSEL_ORDER}]")


def bessel_J(m, x):
    _check_order(m)
    return sp.jv(m, x)


def bessel_Y(m, x):
    _check_order(m)
    return sp.yv(m, x)


def bessel_I(m, x):
    _check_order(m)
    v = sp.iv(m, x)
    if not np.all(np.isfinite(v)):
        raise OverflowRangeError("I_m overflows; use bessel_I_scaled")
    return v


def bessel_I_scaled(m, x):
    """exp(-x) I_m(x) for x >= 0."""
    _check_order(m)
    return sp.ive(m, x)


@lru_cache(maxsize=256)
def bessel_transition_point(m):
    """Smallest positive root of J_m(x) = Y_m(x)."""
    j1 = float(sp.jn_zeros(m, 1)[0])
    lo = 1e-3 * (m + 1)
    return brentq(lambda x: sp.jv(m, x) - sp.yv(m, x), lo, j1, xtol=1e-15)


def env_bessel_J(m, x):
    """Envelope of J_m: sqrt(J^2 + Y^2) beyond the first root of J = Y, sqrt(2)|J| below."""
    _check_order(m)
    x = np.asarray(x, dtype=float)
    X = bessel_transition_point(m)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(x >= X, np.hypot(sp.jv(m, x), sp.yv(m, np.maximum(x, X))),
                       math.sqrt(2.0) * np.abs(sp.jv(m, x)))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# parabolic cylinder functions

@dataclass(frozen=True)
class PCPair:
    """U(a, t), U'(a, t), Ubar(a, t), Ubar'(a, t) at one point."""

    u: float
    du: float
    ubar: float
    dubar: float
    a: float
    t: float

    def wronskian(self):
        return self.u * self.dubar - self.du * self.ubar


def pc_at_zero(a):
    """Closed forms of U, U', Ubar, Ubar' at t = 0."""
    u0 = math.sqrt(math.pi) * 2.0 ** (-0.5 * a - 0.25) * sp.rgamma(0.75 + 0.5 * a)
    du0 = -math.sqrt(math.pi) * 2.0 ** (-0.5 * a + 0.25) * sp.rgamma(0.25 + 0.5 * a)
    g = sp.gamma(0.5 - a)
    v0 = 2.0 ** (0.5 * a + 0.25) * sincos_pi(0.75 - 0.5 * a)[0] * sp.rgamma(0.75 - 0.5 * a)
    dv0 = 2.0 ** (0.5 * a + 0.75) * sincos_pi(0.25 - 0.5 * a)[0] * sp.rgamma(0.25 - 0.5 * a)
    return u0, du0, g * v0, g * dv0


def _asymptotic_scaled(a, t):
    """Large-t series: returns (g, g', h, h') with U = exp(-t^2/4) g, Ubar = exp(t^2/4) h."""
    pu = -a - 0.5
    pv = a - 0.5
    out = []
    for sign, p, shift in ((-1.0, pu, 0.5 + a), (1.0, pv, 0.5 - a)):
        s = ds = 0.0
        term = 1.0
        k = 0
        while True:
            s += term
            ds += term * (p - 2 * k) / t
            nxt = term * sign * (shift + 2 * k) * (shift + 2 * k + 1) / ((k + 1) * 2.0 * t * t)
            if abs(nxt) <= 1e-17 * abs(s) or abs(nxt) >= abs(term) or k > 200:
                break
            term = nxt
            k += 1
        if abs(nxt) > 1e-15 * abs(s) and abs(nxt) >= abs(term):
            raise ConvergenceError(f"PC asymptotic series not converged at a={a}, t={t}")
        scale = t ** p
        out.append((s * scale, ds * scale))
    (g, dg), (h, dh) = out
    coef = SQRT_2_OVER_PI * sp.gamma(0.5 - a)
    return g, dg, coef * h, coef * dh


def _asymptotic_start(a):
    """A point beyond which the asymptotic series is accurate to double precision."""
    # the series terms shrink like (a + 2k)^2 / (2 k t^2), so t must also grow linearly in |a|
    return max(2.0 * math.sqrt(max(-a, 0.0)) + 14.0, 1.2 * abs(a) + 8.0)


class _WeberTables:
    """Dense solutions of Weber's equation for one value of ``a`` on [0, X]."""

    def __init__(self, a):
        if a > 0:
            raise DomainError("parabolic cylinder kernel requires a <= 0")
        self.a = a
        self.X = X = _asymptotic_start(a)
        g, dg, _, _ = _asymptotic_scaled(a, X)
        opts = dict(method="DOP853", rtol=1e-13, atol=1e-300, dense_output=True, first_step=1e-3)
        # U = exp(-t^2/4) g: g'' = t g' + (a + 1/2) g, recessive direction is t -> 0
        self._g = solve_ivp(lambda t, y: (y[1], t * y[1] + (0.5 + a) * y[0]),
                            (X, 0.0), (g, dg), **opts).sol
        _, _, h0, dh0 = pc_at_zero(a)
        # Ubar = exp(t^2/4) h: h'' = -t h' + (a - 1/2) h, stable for increasing t
        self._h = solve_ivp(lambda t, y: (y[1], -t * y[1] + (a - 0.5) * y[0]),
                            (0.0, X), (h0, dh0), **opts).sol
        self._crossing = None

    def scaled(self, t):
        """(g, g', h, h') arrays for t >= 0."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((4, t.size))
        inner = t <= self.X
        if np.any(inner):
            out[0:2, inner] = self._g(t[inner])
            out[2:4, inner] = self._h(t[inner])
        for i in np.nonzero(~inner)[0]:
            out[:, i] = _asymptotic_scaled(self.a, t[i])
        return out

    def values(self, t):
        """(U, U', Ubar, Ubar') for t >= 0, unscaled."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        g, dg, h, dh = self.scaled(t)
        em = np.exp(-0.25 * t * t)
        ep = np.exp(0.25 * t * t)
        return (em * g, em * (dg - 0.5 * t * g), ep * h, ep * (dh + 0.5 * t * h))

    def crossing(self):
        """Largest root of U = Ubar (0 if there is none)."""
        if self._crossing is None:
            tp = 2.0 * math.sqrt(-self.a)

            def ratio(t):
                g, _, h, _ = self.scaled(t)[:, 0]
                return g * math.exp(-0.5 * t * t) - h

            hi = tp + 2.0
            t = hi
            found = 0.0
            while t > 0.0:
                lo = max(t - 0.05, 0.0)
                if ratio(lo) > 0.0 >= ratio(t):
                    found = brentq(ratio, lo, t, xtol=1e-14)
                    break
                t = lo
            self._crossing = found
        return self._crossing


@lru_cache(maxsize=64)
def _tables(a):
    return _WeberTables(float(a))


def sincos_pi(a):
    """(sin(pi a), cos(pi a)) with exact zeros at integers and half-integers."""
    r = a - 2.0 * round(0.5 * a)  # in [-1, 1]
    sign = 1.0
    if r < 0:
        r, sign = -r, -1.0
    # fold onto [0, 1/2] for the sine, tracking the cosine sign
    if r > 0.5:
        rs, csign = 1.0 - r, -1.0
    else:
        rs, csign = r, 1.0
    sn = 0.0 if rs == 0.0 else math.sin(math.pi * rs)
    cs = 0.0 if rs == 0.5 else math.cos(math.pi * rs)
    return sign * sn, csign * cs


def pcf_arrays(a, t):
    """Vectorised U, U', Ubar, Ubar' for real ``t`` (negative t via connection formulae)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(np.abs(t) > PC_EXPONENT_GUARD):
        raise OverflowRangeError(f"|t| > {PC_EXPONENT_GUARD}: use pcf_scaled")
    tab = _tables(a)
    u, du, ub, dub = tab.values(np.abs(t))
    neg = t < 0
    if np.any(neg):
        s, c = sincos_pi(a)
        # U(a,-x) = -sin(pi a) U + cos(pi a) Ubar ; Ubar(a,-x) = cos(pi a) U + sin(pi a) Ubar
        un = -s * u + c * ub
        dun = -(-s * du + c * dub)
        ubn = c * u + s * ub
        dubn = -(c * du + s * dub)
        u, du = np.where(neg, un, u), np.where(neg, dun, du)
        ub, dub = np.where(neg, ubn, ub), np.where(neg, dubn, dub)
    return u, du, ub, dub


def pcf(a, t):
    """Parabolic cylinder pair U(a, t), Ubar(a, t) and derivatives, for a <= 0."""
    u, du, ub, dub = pcf_arrays(a, t)
    return PCPair(float(u[0]), float(du[0]), float(ub[0]), float(dub[0]), float(a), float(t))


def pcf_scaled(a, t):
    """PCPair whose U fields carry exp(+t^2/4) and Ubar fields exp(-t^2/4); t >= 0."""
    if t < 0:
        raise DomainError("pcf_scaled is defined for t >= 0")
    g, dg, h, dh = _tables(a).scaled(t)[:, 0]
    return PCPair(g, dg - 0.5 * t * g, h, dh + 0.5 * t * h, float(a), float(t))


def pc_wronskian(a):
    """Exact U Ubar' - U' Ubar = sqrt(2/pi) Gamma(1/2 - a)."""
    return SQRT_2_OVER_PI * sp.gamma(0.5 - a)


def env_pcu(a, t):
    """Envelope of U(a, .): hypot(U, Ubar) left of the last U = Ubar crossing, sqrt(2)|U| right of it."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    u, _, ub, _ = pcf_arrays(a, t)
    X = _tables(a).crossing()
    out = np.where(t >= X, math.sqrt(2.0) * np.abs(u), np.hypot(u, ub))
    return out
