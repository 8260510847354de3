"""Liouville maps x -> xi, |eta|, zeta, rho and the associated potentials.

Every integral is rewritten with a trigonometric or hyperbolic substitution
that leaves a bounded, smooth integrand, then handed to the tanh-sinh rule.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .eigensystem import action_J, alpha_of_sigma  # noqa: F401  (re-exported)
from .errors import ConvergenceError, DomainError
from .specfun import tanh_sinh


class Branch(enum.Enum):
    RADIAL_XI = "radial_xi"
    POLE_ETA = "pole_eta"
    TURNING_ZETA = "turning_zeta"
    FIXEDN_RHO = "fixedn_rho"


@dataclass(frozen=True)
class MapPoint:
    x: float
    value: float
    branch: Branch


# ---------------------------------------------------------------------------
# basic integrals

def xi(x, sigma):
    """xi = int_1^x sqrt((t^2 - sigma^2)/(t^2 - 1)) dt for x >= 1."""
    if x < 1.0:
        raise DomainError("xi is defined for x >= 1")
    if x == 1.0:
        return 0.0
    s2 = sigma * sigma
    # t = cosh(s)
    return tanh_sinh(lambda s: np.sqrt(np.cosh(s) ** 2 - s2), 0.0, math.acosh(x))


def outer_action(x, sigma):
    """int_x^1 sqrt((t^2 - sigma^2)/(1 - t^2)) dt for sigma <= x <= 1."""
    if x >= 1.0:
        return 0.0
    s2 = sigma * sigma
    # t = cos(theta), theta in [0, arccos x]
    return tanh_sinh(lambda th: np.sqrt(np.maximum(np.cos(th) ** 2 - s2, 0.0)), 0.0, math.acos(x))


def eta_abs(x, sigma):
    """|eta|: xi^2 for x > 1, (int_x^1 sqrt((t^2-sigma^2)/(1-t^2)) dt)^2 for sigma < x < 1."""
    if x <= sigma:
        raise DomainError("eta_abs requires x > sigma")
    if x >= 1.0:
        return xi(x, sigma) ** 2
    return outer_action(x, sigma) ** 2


def inner_action(x, sigma):
    """int_0^x sqrt((sigma^2 - t^2)/(1 - t^2)) dt = sigma E(x; 1/sigma), 0 <= x <= sigma."""
    if x <= 0.0:
        return 0.0
    s2 = sigma * sigma
    end = math.asin(min(x / sigma, 1.0))

    def f(phi):
        c = np.cos(phi)
        return s2 * c * c / np.sqrt(1.0 - s2 * np.sin(phi) ** 2)

    return tanh_sinh(f, 0.0, end)


def gap_action(x, sigma):
    """int_x^sigma sqrt((sigma^2 - t^2)/(1 - t^2)) dt for 0 <= x <= sigma (no cancellation near sigma)."""
    if x >= sigma:
        return 0.0
    s2 = sigma * sigma
    # t = sigma cos(theta)
    end = math.acos(max(x / sigma, -1.0))

    def f(th):
        s = np.sin(th)
        return s2 * s * s / np.sqrt(1.0 - s2 * np.cos(th) ** 2)

    return tanh_sinh(f, 0.0, end)


def rising_action(x, sigma):
    """int_sigma^x sqrt((t^2 - sigma^2)/(1 - t^2)) dt for sigma <= x < 1."""
    if x <= sigma:
        return 0.0
    s2 = sigma * sigma
    if sigma == 0.0:
        return 1.0 - math.sqrt(1.0 - x * x)
    # t = sigma cosh(s)
    end = math.acosh(x / sigma)

    def f(s):
        sh = np.sinh(s)
        return s2 * sh * sh / np.sqrt(np.maximum(1.0 - s2 * np.cosh(s) ** 2, 1e-300))

    return tanh_sinh(f, 0.0, end)


# ---------------------------------------------------------------------------
# zeta map

def _solve_monotone(func, target, lo, hi, tol=1e-15):
    """Root of increasing func(u) = target on [lo, hi] by safeguarded Newton (numeric slope)."""
    flo = func(lo) - target
    fhi = func(hi) - target
    if flo > 0 or fhi < 0:
        raise ConvergenceError("zeta root not bracketed")
    u = 0.5 * (lo + hi)
    for _ in range(200):
        fu = func(u) - target
        if fu == 0.0:
            return u
        if fu > 0:
            hi = u
        else:
            lo = u
        du = 1e-7 * max(abs(u), 1e-8)
        slope = (func(u + du) - func(u - du)) / (2 * du)
        step = u - fu / slope if slope > 0 else None
        u = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= tol * max(abs(u), 1e-300):
            break
    return u


def _two_phi_minus_sin(phi):
    """2 phi - sin(2 phi), series for small phi."""
    if phi < 1e-2:
        p2 = phi * phi
        return phi * p2 * (4.0 / 3.0 - p2 * (4.0 / 15.0 - p2 * (8.0 / 315.0)))
    return 2.0 * phi - math.sin(2.0 * phi)


def _sinh_minus_two(s):
    """sinh(2 s) - 2 s, series for small s."""
    if s < 1e-2:
        s2 = s * s
        return s * s2 * (4.0 / 3.0 + s2 * (4.0 / 15.0 + s2 * (8.0 / 315.0)))
    return math.sinh(2.0 * s) - 2.0 * s


def zeta_parts(x, sigma, alpha):
    """zeta together with alpha^2 - zeta^2, the latter accurate near the turning point."""
    if not 0.0 <= x < 1.0:
        raise DomainError("zeta is defined for 0 <= x < 1")
    if alpha == 0.0:
        z = rho(x)
        return z, -z * z
    a2 = alpha * alpha
    if x == 0.0:
        return 0.0, a2
    if x <= sigma and inner_action(x, sigma) < 0.5 * a2 * math.pi / 8:
        # nearer the origin: zeta = alpha sin(psi), (alpha^2/4)(2 psi + sin 2 psi) = int_0^x (...)
        target = 4.0 * inner_action(x, sigma) / a2
        psi = _solve_monotone(lambda u: 2.0 * u + math.sin(2.0 * u), target, 0.0, 0.5 * math.pi)
        return alpha * math.sin(psi), a2 * math.cos(psi) ** 2
    if x <= sigma:
        # zeta = alpha cos(phi): (alpha^2/4)(2 phi - sin 2 phi) = int_x^sigma (...)
        target = 4.0 * gap_action(x, sigma) / a2
        if target == 0.0:
            return alpha, 0.0
        phi = _solve_monotone(_two_phi_minus_sin, target, 0.0, 0.5 * math.pi)
        return alpha * math.cos(phi), a2 * math.sin(phi) ** 2
    # zeta = alpha cosh(s): (alpha^2/4)(sinh 2s - 2s) = int_sigma^x (...)
    target = 4.0 * rising_action(x, sigma) / a2
    hi = 1.0
    while _sinh_minus_two(hi) < target:
        hi *= 2.0
    s = _solve_monotone(_sinh_minus_two, target, 0.0, hi)
    return alpha * math.cosh(s), -a2 * math.sinh(s) ** 2


def zeta(x, sigma, alpha):
    """Turning-point map: zeta(0) = 0, zeta(sigma) = alpha, increasing."""
    return zeta_parts(x, sigma, alpha)[0]


def pc_prefactor_sq(x, sigma, alpha):
    """(alpha^2 - zeta^2) / ((sigma^2 - x^2)(1 - x^2)), finite through x = sigma."""
    _, gap = zeta_parts(x, sigma, alpha)
    den = (sigma - x) * (sigma + x)
    if alpha == 0.0:
        return 1.0 / math.sqrt(1.0 - x * x) if x == 0.0 else gap / (den * (1.0 - x * x))
    if abs(x - sigma) <= 1e-9 * max(sigma, 1e-300):
        # limit (alpha^2 / (sigma^2 (1 - sigma^2)))^(1/3)
        r = (alpha * alpha / (sigma * sigma * (1.0 - sigma * sigma))) ** (1.0 / 3.0)
        return r / (1.0 - x * x)
    return gap / (den * (1.0 - x * x))


# ---------------------------------------------------------------------------
# fixed-n map

def rho(x):
    """rho = sqrt(2 - 2 sqrt(1 - x^2)) on [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise DomainError("rho is defined for 0 <= x <= 1")
    return x * math.sqrt(2.0 / (1.0 + math.sqrt(1.0 - x * x)))


def rho_over_x(x):
    return math.sqrt(2.0 / (1.0 + math.sqrt(1.0 - x * x)))


def Phi(r, a):
    """a ln(1 - r^2/4) / (4 r), with the r = 0 value 0."""
    if r == 0.0:
        return 0.0
    if r < 1e-4:
        r2 = r * r
        return -a * r / 16.0 * (1.0 + r2 / 8.0)
    return a * math.log1p(-0.25 * r * r) / (4.0 * r)


def Phi_prime(r, a):
    if r < 1e-4:
        return -a / 16.0 * (1.0 + 3.0 * r * r / 8.0)
    q = 1.0 - 0.25 * r * r
    return a * (-0.5 * r / q) / (4.0 * r) - a * math.log(q) / (4.0 * r * r)


def rho_hat(r, a, gamma):
    return r + Phi(r, a) / gamma


# ---------------------------------------------------------------------------
# potentials (diagnostics only)

def psi_lg(x, sigma, m):
    """Residual potential of the radial Liouville-Green form, x != 1, x != sigma."""
    x2, s2 = x * x, sigma * sigma
    if x2 == 1.0 or x2 == s2:
        raise DomainError("psi_lg is singular at x = 1 and x = sigma")
    return ((m * m - 1) / ((x2 - 1) * (x2 - s2))
            + (1 - s2) * (6 * x2 * x2 - (3 + s2) * x2 - 2 * s2) / (4 * (x2 - 1) * (x2 - s2) ** 3))


def psi_hat(x, sigma, m):
    """Residual potential of the Bessel (pole) form; analytic at x = 1."""
    x2, s2 = x * x, sigma * sigma
    if x2 == s2:
        raise DomainError("psi_hat is singular at the turning point")
    if abs(x - 1.0) < 1e-6:
        # evaluate by symmetric averaging around the removable point
        h = 1e-3
        return 0.5 * (psi_hat(1.0 + h, sigma, m) + psi_hat(1.0 - h, sigma, m))
    eta = eta_abs(x, sigma)
    eta = eta if x > 1 else -eta
    return ((1 - 4 * m * m) / (16 * eta) + (m * m - 1) / (4 * (x2 - 1) * (x2 - s2))
            + (1 - s2) * (6 * x2 * x2 - (3 + s2) * x2 - 2 * s2) / (16 * (x2 - 1) * (x2 - s2) ** 3))


def psi_pc(x, z, sigma, alpha, m):
    """Residual potential of the parabolic-cylinder form (x != sigma)."""
    x2, s2, a2, z2 = x * x, sigma * sigma, alpha * alpha, z * z
    if x2 == s2:
        raise DomainError("psi_pc is evaluated away from the turning point")
    return ((1 - m * m) * (a2 - z2) / ((1 - x2) * (s2 - x2))
            + (2 * a2 + 3 * z2) / (4 * (a2 - z2) ** 2)
            - (1 - s2) * (a2 - z2) * (6 * x2 * x2 - (s2 + 3) * x2 - 2 * s2) / (4 * (1 - x2) * (s2 - x2) ** 3))


def phi5(r, a):
    """-a r / (4 - r^2), the large perturbation term of the fixed-n equation."""
    return -a * r / (4.0 - r * r)


def chi5(r, m):
    r2 = r * r
    if r2 == 2.0 or r2 == 4.0:
        raise DomainError("chi5 is singular at rho = sqrt(2)")
    return r2 * (4 * m * m - 1) / (2 - r2) ** 2 + (7 * r2 - 40) / (4 * (4 - r2) ** 2) + 4 * m * m / (4 - r2)


def map_point(x, branch, sigma=0.0, alpha=0.0):
    if branch is Branch.RADIAL_XI:
        v = xi(x, sigma)
    elif branch is Branch.POLE_ETA:
        v = eta_abs(x, sigma)
    elif branch is Branch.TURNING_ZETA:
        v = zeta(x, sigma, alpha)
    else:
        v = rho(x)
    return MapPoint(float(x), float(v), branch)
