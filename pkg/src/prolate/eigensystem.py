"""Separation constant, expansion coefficients and the turning-point parameter.

The coefficients a_k satisfy a three-term recurrence whose matrix becomes
symmetric after scaling row k by sqrt(h_l), l = n + 2k, where h_l is the
squared norm of the Ferrers function P^m_l on (-1, 1).  Eigenvalues of the
symmetrised matrix are found by Sturm-sequence bisection and the vector by
inverse iteration.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from .errors import AdmissibilityError, ConvergenceError, DomainError
from .specfun import tanh_sinh


class LossOfSignificanceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class ModeIndex:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 0:
            raise AdmissibilityError(f"m >= 0 violated (m={self.m})")
        if self.m > self.n:
            raise AdmissibilityError(f"m <= n violated (m={self.m}, n={self.n})")

    @property
    def k_minus(self):
        return (self.n - self.m) // 2

    @property
    def k_plus(self):
        return (self.n + self.m) // 2

    @property
    def l_min(self):
        return self.n - 2 * self.k_minus

    @property
    def parity(self):
        """+1 for even angular functions, -1 for odd ones."""
        return -1 if (self.m + self.n) % 2 else 1


def as_mode(mode):
    if isinstance(mode, ModeIndex):
        return mode
    m, n = mode
    return ModeIndex(int(m), int(n))


def log_norm_sq(l, m):
    """log of h_l = 2 (l+m)! / ((2l+1) (l-m)!)."""
    return math.log(2.0) + math.lgamma(l + m + 1) - math.log(2 * l + 1) - math.lgamma(l - m + 1)


def recurrence_coeffs(mode, k, gamma):
    """(A, B, C) multiplying a_{k-1}, a_k, a_{k+1} in the coefficient recurrence."""
    mode = as_mode(mode)
    m, n = mode.m, mode.n
    g2 = gamma * gamma
    l = n + 2 * k
    A = (n - m + 2 * k - 1) * (n - m + 2 * k) / ((2 * l - 3) * (2 * l - 1)) * g2
    B = 2.0 * (l * (l + 1) + m * m - 1) / ((2 * l - 1) * (2 * l + 3)) * g2 - l * (l + 1)
    C = (n + m + 2 * k + 1) * (n + m + 2 * k + 2) / ((2 * l + 3) * (2 * l + 5)) * g2
    return A, B, C


def default_trunc(mode, gamma):
    mode = as_mode(mode)
    return max(2 * mode.n, math.ceil(1.5 * gamma)) + 30


def symmetric_tridiagonal(mode, gamma, trunc):
    """Diagonal and off-diagonal of the symmetrised matrix whose eigenvalues are lambda.

    Rows run over k = -k_minus, ..., trunc.
    """
    mode = as_mode(mode)
    ks = np.arange(-mode.k_minus, trunc + 1)
    diag = np.empty(ks.size)
    off = np.empty(ks.size - 1)
    for i, k in enumerate(ks):
        A, B, C = recurrence_coeffs(mode, k, gamma)
        diag[i] = -B
        if i + 1 < ks.size:
            A1, _, _ = recurrence_coeffs(mode, k + 1, gamma)
            off[i] = -math.sqrt(A1 * C)
    return ks, diag, off


def sturm_count(diag, off, x):
    """Number of eigenvalues of the symmetric tridiagonal matrix below ``x``."""
    count = 0
    q = 1.0
    tiny = 1e-300
    for i in range(diag.size):
        e2 = off[i - 1] ** 2 if i else 0.0
        q = diag[i] - x - (e2 / q if i else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0.0:
            count += 1
    return count


def sturm_eigenvalue(diag, off, rank):
    """Eigenvalue of ascending ``rank`` (0-based) by bisection on the Sturm count."""
    r = np.abs(off)
    rad = np.zeros(diag.size)
    rad[:-1] += r
    rad[1:] += r
    lo = float(np.min(diag - rad))
    hi = float(np.max(diag + rad))
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if sturm_count(diag, off, mid) > rank:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 2.0 * np.finfo(float).eps * max(abs(lo), abs(hi), 1e-300):
            break
    return 0.5 * (lo + hi)


def _rank(mode):
    return as_mode(mode).k_minus


def eigenvalue_oracle(mode, gamma, trunc=None, tol=1e-10, max_doublings=6):
    """lambda_n^m(gamma^2) from the truncated recurrence, converged under doubling."""
    mode = as_mode(mode)
    if gamma < 0:
        raise DomainError("gamma must be >= 0")
    if gamma == 0:
        # diagonal matrix: the Legendre limit is exact
        return 0.0 - recurrence_coeffs(mode, 0, 0.0)[1]
    trunc = trunc or default_trunc(mode, gamma)
    _, d, e = symmetric_tridiagonal(mode, gamma, trunc)
    lam = sturm_eigenvalue(d, e, _rank(mode))
    for _ in range(max_doublings):
        trunc *= 2
        _, d, e = symmetric_tridiagonal(mode, gamma, trunc)
        new = sturm_eigenvalue(d, e, _rank(mode))
        if abs(new - lam) < tol * max(1.0, abs(new)):
            return new
        lam = new
    raise ConvergenceError(f"eigenvalue for {mode} at gamma={gamma} not converged")


class Normalization(enum.Enum):
    LEGENDRE_SUM = "legendre_sum"
    UNIT_VECTOR = "unit_vector"


@dataclass(frozen=True)
class CoefficientTable:
    mode: ModeIndex
    gamma: float
    lam: float
    k_min: int
    k_max: int
    values: tuple
    normalization: Normalization
    # a_k for -k_plus <= k < -k_minus (only enter the Bessel-series solution)
    lower: tuple = ()

    def __getitem__(self, k):
        if self.k_min <= k <= self.k_max:
            return self.values[k - self.k_min]
        lo = -self.mode.k_plus
        if lo <= k < self.k_min:
            return self.lower[k - lo]
        return 0.0

    @property
    def ks(self):
        return range(self.k_min, self.k_max + 1)

    def as_array(self):
        return np.asarray(self.values)

    def norm_sum(self):
        """sum_k a_k^2 h_{n+2k}."""
        m, n = self.mode.m, self.mode.n
        return sum(a * a * math.exp(log_norm_sq(n + 2 * k, m)) for k, a in zip(self.ks, self.values))


def _inverse_iteration(diag, off, lam, iters=4):
    n = diag.size
    shift = lam + 1e-13 * max(1.0, abs(lam))
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag - shift
    ab[2, :-1] = off
    v = np.ones(n) / math.sqrt(n)
    for _ in range(iters):
        v = solve_banded((1, 1), ab, v)
        v /= np.linalg.norm(v)
    resid = diag * v - lam * v
    resid[:-1] += off * v[1:]
    resid[1:] += off * v[:-1]
    scale = np.max(np.abs(diag)) + 2 * np.max(np.abs(off), initial=0.0) + 1.0
    if np.linalg.norm(resid) > 1e-8 * scale:
        raise ConvergenceError("inverse iteration stalled (near-degenerate eigenvalue)")
    return v


def _lower_coefficients(mode, gamma, lam, a_first):
    """Solve the finite recurrence block for -k_plus <= k < -k_minus."""
    lo, hi = -mode.k_plus, -mode.k_minus
    size = hi - lo
    if size == 0:
        return ()
    mat = np.zeros((size, size))
    rhs = np.zeros(size)
    for i, k in enumerate(range(lo, hi)):
        A, B, C = recurrence_coeffs(mode, k, gamma)
        if i > 0:
            mat[i, i - 1] = A
        mat[i, i] = lam + B
        if i + 1 < size:
            mat[i, i + 1] = C
        else:
            rhs[i] = -C * a_first
    return tuple(np.linalg.solve(mat, rhs))


def _table_from(mode, gamma, trunc, normalization):
    ks, d, e = symmetric_tridiagonal(mode, gamma, trunc)
    if gamma == 0:
        lam = float(d[mode.k_minus])
        v = np.zeros(ks.size)
        v[mode.k_minus] = 1.0
    else:
        lam = sturm_eigenvalue(d, e, _rank(mode))
        v = _inverse_iteration(d, e, lam)
    i0 = mode.k_minus
    if v[i0] < 0:
        v = -v
    if normalization is Normalization.LEGENDRE_SUM:
        logh = np.array([log_norm_sq(mode.n + 2 * k, mode.m) for k in ks])
        a = v * np.exp(0.5 * (logh[i0] - logh))
    else:
        a = v
    lower = _lower_coefficients(mode, gamma, lam, a[0])
    return CoefficientTable(mode, float(gamma), lam, int(ks[0]), int(ks[-1]),
                            tuple(float(x) for x in a), normalization, lower)


def coefficient_table(mode, gamma, trunc=None, tol=1e-10, normalization=Normalization.LEGENDRE_SUM,
                      max_doublings=6):
    """Converged expansion coefficients a_{n,k}^m(gamma^2).

    Under LEGENDRE_SUM the table satisfies sum_k a_k^2 h_{n+2k} = h_n, i.e. the
    angular function has the integral of its square fixed as in the normalisation
    condition, with a_{n,0} > 0.
    """
    mode = as_mode(mode)
    trunc = trunc or default_trunc(mode, gamma)
    table = _table_from(mode, gamma, trunc, normalization)
    for _ in range(max_doublings):
        big = _table_from(mode, gamma, 2 * trunc, normalization)
        amax = max(abs(x) for x in big.values)
        diff = max(abs(table[k] - big[k]) for k in big.ks)
        if abs(big.lam - table.lam) < tol * max(1.0, abs(big.lam)) and diff < tol * amax:
            return table
        table, trunc = big, 2 * trunc
    raise ConvergenceError(f"coefficient table for {mode} at gamma={gamma} not converged")


def _checked_sum(terms, what):
    terms = np.asarray(terms, dtype=float)
    total = float(math.fsum(terms))
    big = float(np.max(np.abs(terms))) if terms.size else 0.0
    if big and abs(total) < 1e-8 * big:
        warnings.warn(f"{what}: alternating sum cancels below 1e-8 of its largest term",
                      LossOfSignificanceWarning, stacklevel=3)
    return total


def norm_A(table):
    """Normalising constant A_n^m = sum_{k >= -k_plus} (-1)^k a_k."""
    ks = range(-table.mode.k_plus, table.k_max + 1)
    return _checked_sum([(-1) ** (k % 2) * table[k] for k in ks], "A_n^m")


def K_const(table):
    """Constant of the recessive law Ps ~ K (1 - x)^(m/2) at x = 1."""
    m, n = table.mode.m, table.mode.n
    terms = [(-1) ** (k % 2) * math.exp(math.lgamma(n + 2 * k + m + 1) - math.lgamma(n + 2 * k - m + 1)) * a
             for k, a in zip(table.ks, table.values)]
    pref = (-1) ** m / (2.0 ** (0.5 * m) * math.factorial(m))
    return pref * _checked_sum(terms, "K_n^m")


# ---------------------------------------------------------------------------
# asymptotic side

def action_J(sigma):
    """J(sigma) = int_0^sigma sqrt((sigma^2 - t^2) / (1 - t^2)) dt; J(0) = 0, J(1) = 1."""
    if not 0.0 <= sigma <= 1.0:
        raise DomainError("action_J needs 0 <= sigma <= 1")
    if sigma == 0.0:
        return 0.0
    s2 = sigma * sigma

    # t = sigma sin(phi); cos(phi) taken from the distance to pi/2
    def f(phi, _, dr):
        c = np.sin(dr)
        return s2 * c * c / np.sqrt((1.0 - s2) + s2 * c * c)

    return tanh_sinh(f, 0.0, 0.5 * math.pi, distances=True)


def action_J_prime(sigma):
    """dJ/dsigma = sigma K(sigma^2)."""
    from scipy.special import ellipk
    return sigma * ellipk(sigma * sigma)


def solve_sigma(mode, gamma, delta=None):
    """Root of gamma J(sigma) = (n - m + 1/2) pi / 2 on [0, 1)."""
    mode = as_mode(mode)
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    target = 0.5 * (mode.n - mode.m + 0.5) * math.pi / gamma
    if target >= 1.0:
        raise AdmissibilityError(
            f"mode {mode} outside the admissible band at gamma={gamma}: (n-m+1/2)pi/(2 gamma) >= 1")
    if delta is not None and mode.n > 2.0 / math.pi * gamma * (1.0 - delta):
        raise AdmissibilityError(f"n <= 2 gamma (1 - delta) / pi violated for {mode}, gamma={gamma}")
    sigma = brentq(lambda s: action_J(s) - target, 0.0, 1.0, xtol=1e-16, rtol=1e-15)
    # polish with a Newton step
    dj = action_J_prime(sigma)
    if dj > 0:
        sigma -= (action_J(sigma) - target) / dj
    return float(sigma)


def lambda_asymptotic(mode, gamma, delta=None):
    sigma = solve_sigma(mode, gamma, delta)
    return -gamma * gamma * (1.0 - sigma * sigma)


def alpha_of_sigma(sigma):
    """Parabolic-cylinder turning point alpha = 2 sqrt(J(sigma) / pi)."""
    return 2.0 * math.sqrt(action_J(sigma) / math.pi)


@dataclass(frozen=True)
class SpectralState:
    gamma: float
    lam: float
    sigma: float
    alpha: float

    @classmethod
    def from_lambda(cls, gamma, lam, sigma0=None):
        s2 = 1.0 + lam / (gamma * gamma)
        if s2 < 0.0 or s2 >= 1.0:
            raise AdmissibilityError(f"lambda={lam} gives sigma^2={s2} outside [0, 1)")
        sigma = math.sqrt(s2)
        if sigma0 is not None and sigma > sigma0:
            raise AdmissibilityError(f"sigma={sigma:.6g} exceeds sigma0={sigma0}")
        return cls(float(gamma), float(lam), sigma, alpha_of_sigma(sigma))

    @classmethod
    def asymptotic(cls, mode, gamma, sigma0=None, delta=None):
        sigma = solve_sigma(mode, gamma, delta)
        if sigma0 is not None and sigma > sigma0:
            raise AdmissibilityError(f"sigma={sigma:.6g} exceeds sigma0={sigma0}")
        lam = -gamma * gamma * (1.0 - sigma * sigma)
        return cls(float(gamma), lam, sigma, alpha_of_sigma(sigma))

    @classmethod
    def oracle(cls, mode, gamma, sigma0=None):
        return cls.from_lambda(gamma, eigenvalue_oracle(mode, gamma), sigma0)
