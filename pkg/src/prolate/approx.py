"""Uniform large-gamma approximations of the angular and radial functions.

Regimes:

* radial, 1 < x: Bessel J_m in the variable eta = xi^2 (valid up to the pole);
* radial, x >= 1 + delta: Liouville-Green sine law;
* angular, 1 - delta0 <= |x| < 1: modified Bessel I_m in |eta|;
* angular, 0 <= |x| <= 1 - delta0: parabolic cylinder U across the turning
  points, or the fixed-(m, n) variant with a perturbed argument rho_hat.

Matching constants are anchored to the series oracle by default (so that a
comparison isolates the map/kernel error), or taken from the self-contained
asymptotic forms on request.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sp
from scipy.integrate import quad

from . import maps
from .eigensystem import SpectralState, action_J, as_mode, eigenvalue_oracle
from .errors import AdmissibilityError, ConvergenceError, DomainError
from .specfun import env_bessel_J, env_pcu, pc_at_zero, pcf, pcf_arrays

FIXEDN_MAX_N = 10


class Regime(enum.Enum):
    LG_RADIAL = "LG_RADIAL"
    BESSEL_RADIAL = "BESSEL_RADIAL"
    BESSELI_ANGULAR = "BESSELI_ANGULAR"
    PC_ANGULAR = "PC_ANGULAR"
    PC_FIXEDN = "PC_FIXEDN"
    SERIES_ORACLE = "SERIES_ORACLE"


class Anchoring(enum.Enum):
    ORACLE = "oracle"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class RegimePartition:
    delta: float = 0.05
    delta0: float | None = None
    sigma0: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.sigma0 < 1.0:
            raise DomainError("sigma0 must lie in [0, 1)")
        if self.delta0 is None:
            object.__setattr__(self, "delta0", 0.25 * (1.0 - self.sigma0))
        if not 0.0 < self.delta0 < 1.0 - self.sigma0:
            raise DomainError("delta0 must lie in (0, 1 - sigma0)")
        if not 0.0 < self.delta < 1.0:
            raise DomainError("delta must lie in (0, 1)")


@dataclass(frozen=True)
class EvalResult:
    x: float
    value: float
    regime: Regime
    err_estimate: float
    # local amplitude (envelope-scaled) used for relative errors
    scale: float
    log_magnitude: float
    sign: int

    @staticmethod
    def from_log(x, log_mag, sign, regime, err, scale):
        value = sign * math.exp(log_mag) if log_mag < 709.0 else sign * math.inf
        return EvalResult(float(x), value, regime, float(err), float(scale), float(log_mag), int(sign))

    @staticmethod
    def from_value(x, value, regime, err, scale):
        value = float(value)
        lm = math.log(abs(value)) if value != 0 else -math.inf
        sg = (value > 0) - (value < 0)
        return EvalResult(float(x), float(value), regime, float(err), float(scale), lm, sg)

    def reflect(self, x, factor):
        """Same result at -x multiplied by the parity factor (+1 or -1)."""
        return EvalResult(float(x), factor * self.value, self.regime, self.err_estimate,
                          self.scale, self.log_magnitude, factor * self.sign)


@dataclass(frozen=True)
class MatchingConstants:
    c: float
    d: float
    p: float
    log_q: float
    V: float | None
    anchoring: Anchoring

    @property
    def q(self):
        return math.exp(self.log_q)


def _check_gamma(gamma):
    if not gamma > 0:
        raise DomainError("gamma must be positive")


def _err_scale(gamma):
    return gamma ** (-2.0 / 3.0) * math.log(gamma)


# ---------------------------------------------------------------------------
# constants

def log_q(gamma, spectral, literal=False):
    """log q, with q = (g a^2/(2e))^(g a^2/2) (2 pi^2 g)^(1/2) exp(-2 g int_sigma^1 ...).

    ``literal=True`` swaps the middle factor for (pi^2/(2g))^(1/2), kept for
    comparison. Matching the large-argument forms of U and I_m shows that form
    is short by 2 g; only the default satisfies c ~ d q^(1/2).
    """
    _check_gamma(gamma)
    s, a = spectral.sigma, spectral.alpha
    h = 0.5 * gamma * a * a
    first = h * math.log(h / math.e) if h > 0 else 0.0
    middle = math.pi ** 2 / (2.0 * gamma) if literal else 2.0 * math.pi ** 2 * gamma
    return first + 0.5 * math.log(middle) - 2.0 * gamma * maps.outer_action(s, s)


def const_q(mode, gamma, spectral, literal=False):
    as_mode(mode)
    return math.exp(log_q(gamma, spectral, literal))


def _gauss_panels(a, b, panels, order=24):
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (hi - lo) * t + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * w)
    return np.concatenate(xs), np.concatenate(ws)


def _pc_zone_integrand(xs, gamma, spectral):
    s, a = spectral.sigma, spectral.alpha
    A = -0.5 * gamma * a * a
    zs = np.array([maps.zeta(x, s, a) for x in xs])
    pref = np.array([math.sqrt(maps.pc_prefactor_sq(x, s, a)) for x in xs])
    u = pcf_arrays(A, zs * math.sqrt(2.0 * gamma))[0]
    return pref * u * u


def _besseli_zone_integrand(xs, m, gamma, spectral, logq):
    s = spectral.sigma
    out = np.empty(xs.size)
    for i, x in enumerate(xs):
        e = maps.outer_action(x, s)
        z = gamma * e
        r = math.sqrt(e * e / ((1 - x * x) * (x * x - s * s)))
        ive = sp.ive(m, z)
        out[i] = r * math.exp(logq + 2 * (math.log(ive) + z)) if ive > 0 else 0.0
    return out


def const_p(mode, gamma, spectral, partition=RegimePartition(), tol=1e-8):
    """p = int_0^{1-delta0} (PC-zone weight) U^2 dx + q int_{1-delta0}^1 (Bessel-zone weight) I_m^2 dx."""
    mode = as_mode(mode)
    _check_gamma(gamma)
    split = 1.0 - partition.delta0
    logq = log_q(gamma, spectral)
    prev = None
    for panels in (8, 16, 32, 64):
        xs, ws = _gauss_panels(0.0, split, panels)
        first = float(np.dot(ws, _pc_zone_integrand(xs, gamma, spectral)))
        xs, ws = _gauss_panels(split, 1.0, max(2, panels // 4))
        second = float(np.dot(ws, _besseli_zone_integrand(xs, mode.m, gamma, spectral, logq)))
        p = first + second
        if prev is not None and abs(p - prev) <= tol * abs(p):
            return p
        prev = p
    raise ConvergenceError("quadrature for p did not settle")


def c_from_K(mode, spectral, K):
    """c = (-2/lambda)^(m/2) m! K."""
    mode = as_mode(mode)
    lam = spectral.lam
    if lam >= 0:
        raise AdmissibilityError("the pole constant needs lambda < 0")
    return (-2.0 / lam) ** (0.5 * mode.m) * math.factorial(mode.m) * K


def d_from_origin(mode, gamma, spectral, ps0, dps0):
    """d from Ps(0) (even modes) or Ps'(0) (odd modes)."""
    mode = as_mode(mode)
    s, a = spectral.sigma, spectral.alpha
    u0, du0, _, _ = pc_at_zero(-0.5 * gamma * a * a)
    if mode.parity == 1:
        return math.sqrt(s / a) * ps0 / u0
    return math.sqrt(a / s) * dps0 / (math.sqrt(2.0 * gamma) * du0)


def d_asymptotic(mode, p):
    """|d| from the normalisation integral p (the sign is not fixed by p)."""
    mode = as_mode(mode)
    m, n = mode.m, mode.n
    return math.sqrt(math.exp(math.lgamma(n + m + 1) - math.lgamma(n - m + 1)) / ((2 * n + 1) * p))


def c_asymptotic(mode, p, logq):
    return d_asymptotic(mode, p) * math.exp(0.5 * logq)


def origin_sign(mode, gamma):
    """Sign of Ps(0) (even modes) or Ps'(0) (odd modes) from the double-precision series."""
    from .eigensystem import coefficient_table
    mode = as_mode(mode)
    tab = coefficient_table(mode, gamma)
    total = 0.0
    for k in tab.ks:
        l = mode.n + 2 * k
        if mode.parity == 1:
            term = sp.lpmv(mode.m, l, 0.0)
        else:
            # P'(0) = (l + m) P_{l-1}(0)
            term = (l + mode.m) * sp.lpmv(mode.m, l - 1, 0.0) if l - 1 >= mode.m else 0.0
        total += (-1) ** (k % 2) * tab[k] * term
    return 1 if total >= 0 else -1


def V_from_c(mode, gamma, c):
    """V implied by matching the large-x Bessel form to the sine law."""
    mode = as_mode(mode)
    return (-1) ** mode.n * math.sqrt(math.pi / (2.0 * gamma)) / (math.factorial(mode.n - mode.m) * c)


# ---------------------------------------------------------------------------
# kernels

def radial_bessel(x, mode, gamma, spectral, c, err_C=1.0):
    """c (eta / ((x^2-1)(x^2-sigma^2)))^(1/4) J_m(gamma eta^(1/2)), eta = xi^2."""
    mode = as_mode(mode)
    if not x > 1.0:
        raise DomainError("radial_bessel needs x > 1")
    s = spectral.sigma
    xi = maps.xi(x, s)
    pref = math.sqrt(xi / math.sqrt((x * x - 1.0) * (x * x - s * s)))
    z = gamma * xi
    j = float(sp.jv(mode.m, z))
    value = c * pref * j
    scale = abs(c) * pref * env_bessel_J(mode.m, z)
    # twice the first-order term, the same headroom the LG estimate carries
    err = scale * math.expm1(2.0 * bessel_variation(x, mode.m, s) / gamma)
    return EvalResult.from_value(x, value, Regime.BESSEL_RADIAL, err_C * err, scale)


def bessel_variation(x, m, sigma):
    """int_0^eta |psi_hat| v^(-1/2) dv from the pole out to x (x > 1).

    With t = cosh(u) the v^(-1/2) endpoint singularity disappears.
    """
    def integrand(u):
        t = math.cosh(u)
        return abs(maps.psi_hat(t, sigma, m)) * math.sqrt(t * t - sigma * sigma)

    return 2.0 * quad(integrand, 0.0, math.acosh(x), limit=200)[0]


def radial_lg(x, mode, gamma, spectral, V, partition=RegimePartition(), err_C=1.0):
    """(-1)^n sin(gamma xi + gamma J(sigma) - n pi/2) / (gamma (n-m)! V ((x^2-1)(x^2-sigma^2))^(1/4))."""
    mode = as_mode(mode)
    if x < 1.0 + partition.delta:
        raise DomainError(f"radial_lg needs x >= 1 + delta = {1.0 + partition.delta}")
    s = spectral.sigma
    amp = 1.0 / (gamma * math.factorial(mode.n - mode.m) * abs(V)
                 * ((x * x - 1.0) * (x * x - s * s)) ** 0.25)
    phase = gamma * maps.xi(x, s) + gamma * action_J(s) - 0.5 * mode.n * math.pi
    value = (-1) ** mode.n * math.copysign(1.0, V) * amp * math.sin(phase)
    err = amp * math.expm1(lg_variation(x, mode.m, s) / gamma)
    return EvalResult.from_value(x, value, Regime.LG_RADIAL, err_C * err, amp)


def lg_variation(x, m, sigma):
    """int_x^inf |psi| d(xi): variation of the LG error-control function beyond x.

    It grows like (x - 1)^(-1/2) towards the pole, which is what makes the LG
    form degrade there for m >= 2.
    """
    def integrand(t):
        return abs(maps.psi_lg(t, sigma, m)) * math.sqrt((t * t - sigma * sigma) / (t * t - 1.0))

    head = quad(integrand, x, 2.0 * x, limit=200)[0]
    tail = quad(integrand, 2.0 * x, math.inf, limit=200)[0]
    return head + tail


def angular_besselI(x, mode, gamma, spectral, c, partition=RegimePartition(), err_C=1.0, strict=True):
    """c (|eta| / ((1-x^2)(x^2-sigma^2)))^(1/4) I_m(gamma |eta|^(1/2)), carried in log form."""
    mode = as_mode(mode)
    lo = 1.0 - partition.delta0 if strict else spectral.sigma
    if not lo <= x < 1.0 or x <= spectral.sigma:
        raise DomainError("angular_besselI needs 1 - delta0 <= x < 1")
    s = spectral.sigma
    e = maps.outer_action(x, s)
    z = gamma * e
    ive = float(sp.ive(mode.m, z))
    if c == 0 or ive == 0:
        return EvalResult.from_value(x, 0.0, Regime.BESSELI_ANGULAR, 0.0, 0.0)
    log_pref = 0.25 * math.log(e * e / ((1.0 - x * x) * (x * x - s * s)))
    lm = math.log(abs(c)) + log_pref + math.log(ive) + z
    sign = 1 if c > 0 else -1
    res = EvalResult.from_log(x, lm, sign, Regime.BESSELI_ANGULAR, 0.0, 0.0)
    mag = abs(res.value)
    return EvalResult(res.x, res.value, res.regime, err_C * mag / gamma, mag, res.log_magnitude, res.sign)


def angular_pc(x, mode, gamma, spectral, d, partition=RegimePartition(), err_C=1.0, strict=True):
    """d ((alpha^2-zeta^2)/((sigma^2-x^2)(1-x^2)))^(1/4) U(-gamma alpha^2/2, zeta sqrt(2 gamma))."""
    mode = as_mode(mode)
    if not 0.0 <= x <= (1.0 - partition.delta0 if strict else 1.0) or x >= 1.0:
        raise DomainError("angular_pc needs 0 <= x <= 1 - delta0")
    s, a = spectral.sigma, spectral.alpha
    A = -0.5 * gamma * a * a
    t = maps.zeta(x, s, a) * math.sqrt(2.0 * gamma)
    pref = maps.pc_prefactor_sq(x, s, a) ** 0.25
    u = pcf(A, t).u
    value = 0.0 if (x == 0.0 and mode.parity == -1) else d * pref * u
    scale = abs(d) * pref * float(env_pcu(A, t)[0])
    return EvalResult.from_value(x, value, Regime.PC_ANGULAR, err_C * _err_scale(gamma) * scale, scale)


def angular_pc_fixedn(x, mode, gamma, lam, ps0, dps0, partition=RegimePartition(), err_C=1.0):
    """Fixed-(m, n) parabolic cylinder form in rho_hat = rho + Phi(rho)/gamma."""
    mode = as_mode(mode)
    if mode.n > FIXEDN_MAX_N:
        raise AdmissibilityError(f"fixed-n form is limited to n <= {FIXEDN_MAX_N}")
    if not 0.0 <= x <= 1.0 - partition.delta0:
        raise DomainError("angular_pc_fixedn needs 0 <= x <= 1 - delta0")
    a = lam / gamma + gamma
    A = -0.5 * a
    if A > 0:
        raise AdmissibilityError("fixed-n form needs lambda/gamma + gamma >= 0")
    r = maps.rho(x)
    t = maps.rho_hat(r, a, gamma) * math.sqrt(2.0 * gamma)
    pref = math.sqrt(maps.rho_over_x(x)) * (1.0 - x * x) ** -0.25
    u0, du0, _, _ = pc_at_zero(A)
    if mode.parity == 1:
        const = ps0 / u0
    else:
        const = dps0 / du0 / math.sqrt(2.0 * gamma)
    u = pcf(A, t).u
    value = 0.0 if (x == 0.0 and mode.parity == -1) else const * pref * u
    scale = abs(const) * pref * float(env_pcu(A, t)[0])
    err = err_C * math.log(gamma) / gamma * scale
    return EvalResult.from_value(x, value, Regime.PC_FIXEDN, err, scale)


# ---------------------------------------------------------------------------
# dispatcher

@dataclass
class Evaluator:
    """All state for one (mode, gamma): spectral data, constants and regime choice."""

    mode: object
    gamma: float
    partition: RegimePartition = field(default_factory=RegimePartition)
    anchoring: Anchoring = Anchoring.ORACLE
    spectral_source: str = "oracle"
    err_C: float = 1.0

    def __post_init__(self):
        self.mode = as_mode(self.mode)
        _check_gamma(self.gamma)
        self.gamma = float(self.gamma)
        if self.spectral_source == "oracle":
            self.spectral = SpectralState.oracle(self.mode, self.gamma, self.partition.sigma0)
        else:
            self.spectral = SpectralState.asymptotic(self.mode, self.gamma, self.partition.sigma0,
                                                     self.partition.delta)

    # constants are computed on first use and then frozen on the instance
    @functools.cached_property
    def log_q(self):
        return log_q(self.gamma, self.spectral)

    @functools.cached_property
    def p(self):
        return const_p(self.mode, self.gamma, self.spectral, self.partition)

    @functools.cached_property
    def origin_values(self):
        from .oracle import ps_at_zero
        return ps_at_zero(self.mode, self.gamma)

    @functools.cached_property
    def c(self):
        if self.anchoring is Anchoring.ORACLE:
            from .oracle import boundary_K
            return c_from_K(self.mode, self.spectral, boundary_K(self.mode, self.gamma))
        return self.sign * c_asymptotic(self.mode, self.p, self.log_q)

    @functools.cached_property
    def d(self):
        if self.anchoring is Anchoring.ORACLE:
            ps0, dps0 = self.origin_values
            return d_from_origin(self.mode, self.gamma, self.spectral, ps0, dps0)
        return self.sign * d_asymptotic(self.mode, self.p)

    @functools.cached_property
    def sign(self):
        """Sign shared by c and d: that of Ps(0)/U(a, 0), or Ps'(0)/U'(a, 0) for odd modes."""
        a = self.spectral.alpha
        u0, du0, _, _ = pc_at_zero(-0.5 * self.gamma * a * a)
        kernel = u0 if self.mode.parity == 1 else du0
        return origin_sign(self.mode, self.gamma) * (1 if kernel > 0 else -1)

    @functools.cached_property
    def V(self):
        if self.anchoring is Anchoring.ORACLE:
            from .oracle import V_const
            return V_const(self.mode, self.gamma, probes=_v_probes(self.gamma))
        return V_from_c(self.mode, self.gamma, self.c)

    def constants(self):
        return MatchingConstants(self.c, self.d, self.p, self.log_q, self.V, self.anchoring)

    def angular(self, x, method="uniform"):
        if not -1.0 < x < 1.0:
            raise DomainError("angular evaluation needs -1 < x < 1")
        ax = abs(x)
        if ax >= 1.0 - self.partition.delta0:
            res = angular_besselI(ax, self.mode, self.gamma, self.spectral, self.c,
                                  self.partition, self.err_C)
        elif method == "fixedn":
            lam = eigenvalue_oracle(self.mode, self.gamma)
            ps0, dps0 = self.origin_values
            res = angular_pc_fixedn(ax, self.mode, self.gamma, lam, ps0, dps0, self.partition, self.err_C)
        elif method == "uniform":
            res = angular_pc(ax, self.mode, self.gamma, self.spectral, self.d, self.partition, self.err_C)
        else:
            raise DomainError(f"unknown angular method {method!r}")
        if x < 0 or (x == 0 and math.copysign(1.0, x) < 0):
            return res.reflect(x, self.mode.parity)
        return res

    def radial(self, x, method="bessel"):
        if not x > 1.0:
            raise DomainError("radial evaluation needs x > 1")
        if method == "bessel":
            return radial_bessel(x, self.mode, self.gamma, self.spectral, self.c, self.err_C)
        if method == "lg":
            return radial_lg(x, self.mode, self.gamma, self.spectral, self.V, self.partition, self.err_C)
        raise DomainError(f"unknown radial method {method!r}")


def _v_probes(gamma):
    # the ratio is x-independent; nearer probes keep the Legendre series cheap at large gamma
    return (4.0, 6.0, 8.0) if gamma <= 20 else (1.5, 2.0, 2.5)


def evaluate_angular(x, mode, gamma, **options):
    method = options.pop("method", "uniform")
    return Evaluator(mode, gamma, **options).angular(x, method)


def evaluate_radial(x, mode, gamma, **options):
    method = options.pop("method", "bessel")
    return Evaluator(mode, gamma, **options).radial(x, method)
