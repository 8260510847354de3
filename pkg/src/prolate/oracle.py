"""Series-based reference values computed in multiprecision arithmetic.

The Legendre-function series for the angular and radial functions cancel
heavily near x = 1 (and, for the radial series, everywhere beyond x ~ 2),
so every sum here is carried out with mpmath at a working precision that is
raised until the observed cancellation leaves a comfortable margin.  The
coefficients are recomputed at that precision by Rayleigh-quotient iteration
on the symmetrised recurrence matrix, seeded from the double-precision
eigenvalue.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .eigensystem import as_mode, default_trunc, eigenvalue_oracle
from .errors import ConvergenceError, DomainError, OverflowRangeError

MAX_DPS = 1200
MAX_TERMS = 6000


@dataclass(frozen=True)
class SeriesEvaluation:
    value: float
    terms_used: int
    tail_bound: float


# ---------------------------------------------------------------------------
# Legendre kernels

def _legendre_run(m, lmax, x, outer):
    """[P^m_m(x), ..., P^m_lmax(x)] by forward recurrence in degree (mp numbers).

    Ferrers functions for |x| < 1; for x > 1 the same recurrence is seeded with
    (-1)^m (2m-1)!! (x^2 - 1)^(m/2) so that both carry the (-1)^m factor.
    """
    x = mp.mpf(x)
    w = (x * x - 1) if outer else (1 - x * x)
    seed = (-1) ** m * mp.fac2(2 * m - 1) * w ** (mp.mpf(m) / 2) if m else mp.mpf(1)
    out = [seed]
    if lmax == m:
        return out
    out.append(x * (2 * m + 1) * seed)
    for l in range(m + 1, lmax):
        out.append(((2 * l + 1) * x * out[-1] - (l + m) * out[-2]) / (l - m + 1))
    return out


def _to_float(v):
    f = float(v)
    if not math.isfinite(f):
        raise OverflowRangeError("value outside double range")
    return f


def ferrers_P(l, m, x, dps=40):
    """Ferrers function of the first kind P^m_l(x) on (-1, 1), with the (-1)^m phase."""
    if not -1.0 < x < 1.0:
        raise DomainError("ferrers_P requires -1 < x < 1")
    if not 0 <= m <= l:
        raise DomainError("ferrers_P requires 0 <= m <= l")
    with mp.workdps(dps + l // 2):
        return _to_float(_legendre_run(m, l, x, False)[-1])


def legendre_P_gt1(l, m, x, dps=40):
    """P^m_l(x) for x > 1, defined as (-1)^m (x^2-1)^(m/2) d^m P_l/dx^m."""
    if not x > 1.0:
        raise DomainError("legendre_P_gt1 requires x > 1")
    if not 0 <= m <= l:
        raise DomainError("legendre_P_gt1 requires 0 <= m <= l")
    with mp.workdps(dps):
        return _to_float(_legendre_run(m, l, x, True)[-1])


# ---------------------------------------------------------------------------
# multiprecision coefficient table

@dataclass(frozen=True)
class MPTable:
    """a_{n,k}^m at working precision ``dps`` for -k_plus <= k <= k_max."""

    m: int
    n: int
    gamma: float
    dps: int
    lam: object
    k_min: int
    coeffs: tuple

    @property
    def k_max(self):
        return self.k_min + len(self.coeffs) - 1

    def __getitem__(self, k):
        if self.k_min <= k <= self.k_max:
            return self.coeffs[k - self.k_min]
        return mp.mpf(0)


def _mp_rec(m, n, k, g2):
    l = n + 2 * k
    A = mp.mpf((n - m + 2 * k - 1) * (n - m + 2 * k)) / ((2 * l - 3) * (2 * l - 1)) * g2
    B = mp.mpf(2 * (l * (l + 1) + m * m - 1)) / ((2 * l - 1) * (2 * l + 3)) * g2 - l * (l + 1)
    C = mp.mpf((n + m + 2 * k + 1) * (n + m + 2 * k + 2)) / ((2 * l + 3) * (2 * l + 5)) * g2
    return A, B, C


def _thomas(diag, off, shift, rhs):
    n = len(diag)
    cp = [mp.mpf(0)] * n
    dp = [mp.mpf(0)] * n
    eps = mp.mpf(10) ** (-mp.mp.dps)
    piv = diag[0] - shift
    if piv == 0:
        piv = eps
    cp[0] = off[0] / piv if n > 1 else mp.mpf(0)
    dp[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - shift - off[i - 1] * cp[i - 1]
        if piv == 0:
            piv = eps
        if i < n - 1:
            cp[i] = off[i] / piv
        dp[i] = (rhs[i] - off[i - 1] * dp[i - 1]) / piv
    y = [mp.mpf(0)] * n
    y[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        y[i] = dp[i] - cp[i] * y[i + 1]
    return y


def _build_table(m, n, gamma, dps, kmax):
    mode = as_mode((m, n))
    km, kp = mode.k_minus, mode.k_plus
    with mp.workdps(dps):
        g2 = mp.mpf(gamma) ** 2
        ks = list(range(-km, kmax + 1))
        if gamma == 0:
            lam = mp.mpf(n * (n + 1))
            v = [mp.mpf(1) if k == 0 else mp.mpf(0) for k in ks]
        else:
            recs = [_mp_rec(m, n, k, g2) for k in range(-km, kmax + 2)]
            diag = [-r[1] for r in recs[:-1]]
            off = [-mp.sqrt(recs[i + 1][0] * recs[i][2]) for i in range(len(ks) - 1)]
            lam = mp.mpf(eigenvalue_oracle(mode, float(gamma)))
            v = [mp.mpf(1)] * len(ks)
            tol = mp.mpf(10) ** (-(dps - 4)) * max(1, abs(lam))
            for _ in range(12):
                y = _thomas(diag, off, lam, v)
                nrm = mp.sqrt(mp.fsum(t * t for t in y))
                v = [t / nrm for t in y]
                tv = [diag[i] * v[i] + (off[i] * v[i + 1] if i + 1 < len(v) else 0)
                      + (off[i - 1] * v[i - 1] if i else 0) for i in range(len(v))]
                new = mp.fsum(a * b for a, b in zip(v, tv))
                done = abs(new - lam) <= tol
                lam = new
                if done:
                    break
            else:
                raise ConvergenceError("Rayleigh quotient iteration did not converge")
        i0 = km
        if v[i0] < 0:
            v = [-t for t in v]
        # a_k = v_k sqrt(h_n / h_l)
        logh = [mp.log(2) + mp.loggamma(n + 2 * k + m + 1) - mp.log(2 * (n + 2 * k) + 1)
                - mp.loggamma(n + 2 * k - m + 1) for k in ks]
        a = [v[i] * mp.exp((logh[i0] - logh[i]) / 2) for i in range(len(ks))]
        if gamma != 0:
            # Beyond the largest component the vector only has absolute accuracy;
            # rebuild that tail from the minimal solution of the recurrence
            # (backward ratios), which is accurate relative to each term.
            p = max(range(len(v)), key=lambda i: abs(v[i]))
            r = mp.mpf(0)
            ratios = [mp.mpf(0)] * len(ks)
            for i in range(len(ks) - 1, p, -1):
                A, B, C = recs[i]
                r = -A / (lam + B + C * r)
                ratios[i] = r
            for i in range(p + 1, len(ks)):
                a[i] = a[i - 1] * ratios[i]
        lower = []
        size = kp - km
        if size:
            mat = mp.zeros(size, size)
            rhs = mp.zeros(size, 1)
            for i, k in enumerate(range(-kp, -km)):
                A, B, C = _mp_rec(m, n, k, g2)
                if i > 0:
                    mat[i, i - 1] = A
                mat[i, i] = lam + B
                if i + 1 < size:
                    mat[i, i + 1] = C
                else:
                    rhs[i] = -C * a[0]
            sol = mp.lu_solve(mat, rhs)
            lower = [sol[i] for i in range(size)]
        return MPTable(m, n, float(gamma), dps, lam, -kp, tuple(lower) + tuple(a))


@functools.lru_cache(maxsize=64)
def _cached_table(m, n, gamma, dps, kmax):
    return _build_table(m, n, gamma, dps, kmax)


def _round_dps(dps):
    return int(10 * math.ceil(dps / 10))


def base_dps(gamma):
    return _round_dps(30 + 0.45 * gamma)


def mp_table(mode, gamma, dps=None, kmax=None):
    """Coefficient table at working precision ``dps`` with at least ``kmax`` upper terms.

    The truncation is extended until the last coefficients fall below 10^-dps
    relative to the largest one.
    """
    mode = as_mode(mode)
    dps = _round_dps(dps or base_dps(gamma))
    kmax = kmax or default_trunc(mode, gamma)
    while True:
        tab = _cached_table(mode.m, mode.n, float(gamma), dps, kmax)
        with mp.workdps(dps):
            big = max(abs(c) for c in tab.coeffs)
            if abs(tab.coeffs[-1]) <= big * mp.mpf(10) ** (-dps) or gamma == 0:
                return tab
        kmax *= 2
        if kmax > MAX_TERMS:
            raise ConvergenceError("coefficient table does not decay within the term cap")


# ---------------------------------------------------------------------------
# Legendre-series evaluation

def _legendre_sum(tab, x, outer, derivative):
    m, n = tab.m, tab.n
    k0 = -((n - m) // 2)
    lmax = n + 2 * tab.k_max
    P = _legendre_run(m, lmax + 1, x, outer)
    x = mp.mpf(x)
    total = mp.mpf(0)
    dtotal = mp.mpf(0)
    big = mp.mpf(0)
    dbig = mp.mpf(0)
    last = mp.mpf(0)
    w = (x * x - 1) if outer else (1 - x * x)
    for k in range(k0, tab.k_max + 1):
        l = n + 2 * k
        c = tab[k] if k % 2 == 0 else -tab[k]
        term = c * P[l - m]
        total += term
        big = max(big, abs(term))
        last = abs(term)
        if derivative:
            prev = P[l - m - 1] if l > m else 0
            # (1 - x^2) P' = (l + m) P_{l-1} - l x P_l, sign flips outside (-1, 1)
            dp = ((l + m) * prev - l * x * P[l - m]) / w
            if outer:
                dp = -dp
            dterm = c * dp
            dtotal += dterm
            dbig = max(dbig, abs(dterm))
    return total, dtotal, big, dbig, last, tab.k_max - k0 + 1


def _lost_digits(value, big):
    if big == 0:
        return 0.0
    if value == 0:
        return math.inf
    return float(mp.log10(big / abs(value)))


def _margin(gamma):
    return 22 + math.log10(1 + gamma)


def _adaptive(mode, gamma, fn, exact_zero=False):
    """Run fn(table) -> (value, magnitude, tail) raising precision/truncation as needed."""
    mode = as_mode(mode)
    dps = base_dps(gamma)
    kmax = None
    for _ in range(24):
        tab = mp_table(mode, gamma, dps, kmax)
        with mp.workdps(dps):
            value, big, last, used = fn(tab)
            if big and last > big * mp.mpf(10) ** (-(dps - 2)):
                kmax = 2 * tab.k_max
                continue
            if value == 0 and exact_zero:
                return tab, value, last, used
            lost = _lost_digits(value, big)
            if lost + _margin(gamma) > dps:
                if dps >= MAX_DPS:
                    raise ConvergenceError("series cancellation exceeds the precision cap")
                dps = _round_dps(min(MAX_DPS, max(dps + 20, lost + _margin(gamma) + 10)))
                continue
            return tab, value, last, used
    raise ConvergenceError("oracle series did not converge")


def _odd_at_zero(mode, x):
    return x == 0 and mode.parity == -1


def angular_mp(mode, gamma, x, derivative=False):
    """Angular Ps (or its x-derivative) as an mp number, converged to double precision or better."""
    mode = as_mode(mode)
    if not -1 < x < 1:
        raise DomainError("angular functions need -1 < x < 1")

    def fn(tab):
        v, dv, big, dbig, last, used = _legendre_sum(tab, x, False, derivative)
        return (dv, dbig, last, used) if derivative else (v, big, last, used)

    zero = _odd_at_zero(mode, x) if not derivative else (x == 0 and mode.parity == 1)
    return _adaptive(mode, gamma, fn, exact_zero=zero)


def radial_mp(mode, gamma, x, derivative=False):
    mode = as_mode(mode)
    if not x > 1:
        raise DomainError("radial functions need x > 1")

    def fn(tab):
        v, dv, big, dbig, last, used = _legendre_sum(tab, x, True, derivative)
        return (dv, dbig, last, used) if derivative else (v, big, last, used)

    return _adaptive(mode, gamma, fn)


def _evaluation(result):
    _, value, last, used = result
    return SeriesEvaluation(_to_float(value), int(used), float(last))


def angular_series(mode, gamma, x):
    """Angular Ps_n^m(x, gamma^2) from the Ferrers-function series."""
    return _evaluation(angular_mp(mode, gamma, x))


def radial_series(mode, gamma, x):
    """Radial Ps_n^m(x, gamma^2), x > 1, from the Legendre-function series."""
    return _evaluation(radial_mp(mode, gamma, x))


def angular_derivative(mode, gamma, x):
    return _evaluation(angular_mp(mode, gamma, x, derivative=True))


def ps_at_zero(mode, gamma):
    """(Ps(0), Ps'(0)); one of the two vanishes by parity."""
    mode = as_mode(mode)
    if mode.parity == 1:
        return angular_series(mode, gamma, 0.0).value, 0.0
    return 0.0, angular_derivative(mode, gamma, 0.0).value


# ---------------------------------------------------------------------------
# Bessel-series solution and the constants A, K, V

def _half_integer_J(jmin, jmax, z):
    """{j: J_{j+1/2}(z)} for jmin <= j <= jmax (jmin <= -1) by Miller's backward recurrence."""
    z = mp.mpf(z)
    start = max(jmax, int(z)) + 30 + int(1.3 * mp.mp.dps)
    f_next, f = mp.mpf(0), mp.mpf(10) ** (-20)
    vals = {}
    for j in range(start, jmin - 1, -1):
        if j <= jmax:
            vals[j] = f
        f_next, f = f, (2 * j + 1) / z * f - f_next
    s = mp.sqrt(2 / (mp.pi * z))
    scale = (vals[0] * mp.sin(z) + vals[-1] * mp.cos(z)) / s
    return {j: v / scale for j, v in vals.items()}


def norm_A_mp(tab):
    return mp.fsum((-1) ** (k % 2) * tab[k] for k in range(tab.k_min, tab.k_max + 1))


def s1_bessel_series(mode, gamma, x):
    """S^(1), the solution with the cosine law at infinity, from the half-integer Bessel series."""
    mode = as_mode(mode)
    if x < 1.05:
        raise DomainError("the Bessel series is only used for x >= 1.05 (slow convergence nearer 1)")
    if gamma <= 0:
        raise DomainError("the Bessel series needs gamma > 0")
    return _evaluation(s1_mp(mode, gamma, x))


def s1_mp(mode, gamma, x):
    mode = as_mode(mode)
    m, n = mode.m, mode.n

    def fn(tab):
        x_ = mp.mpf(x)
        z = mp.mpf(tab.gamma) * x_
        jmin = min(n - 2 * mode.k_plus, -1)
        J = _half_integer_J(jmin, n + 2 * tab.k_max, z)
        terms = [tab[k] * J[n + 2 * k] for k in range(tab.k_min, tab.k_max + 1)]
        total = mp.fsum(terms)
        big = max(abs(t) for t in terms)
        A = norm_A_mp(tab)
        pref = mp.sqrt(mp.pi / (2 * z)) * (x_ * x_ - 1) ** (-mp.mpf(m) / 2) * x_ ** m / A
        abig = max(abs(tab[k]) for k in range(tab.k_min, tab.k_max + 1))
        # the prefactor divides by A, which itself cancels; fold that loss in
        big_eff = big * abig / abs(A) if A != 0 else mp.inf
        return pref * total, abs(pref) * big_eff, abs(terms[-1] * pref), len(terms)

    return _adaptive(mode, gamma, fn)


def boundary_K(mode, gamma):
    """K_n^m from the coefficient sum, evaluated at cancellation-safe precision."""
    mode = as_mode(mode)
    m, n = mode.m, mode.n

    def fn(tab):
        terms = [(-1) ** (k % 2) * mp.factorial(n + 2 * k + m) / mp.factorial(n + 2 * k - m) * tab[k]
                 for k in range(-mode.k_minus, tab.k_max + 1)]
        total = mp.fsum(terms) * (-1) ** m / (mp.mpf(2) ** (mp.mpf(m) / 2) * mp.factorial(m))
        return total, max(abs(t) for t in terms), abs(terms[-1]), len(terms)

    return _to_float(_adaptive(mode, gamma, fn)[1])


def boundary_limit(mode, gamma, side, h=1e-12):
    """Ps / |x - 1|^(m/2) extrapolated to x = 1 from one side (Richardson in h)."""
    mode = as_mode(mode)
    vals = []
    for step in (h, h / 2):
        if side < 0:
            with mp.workdps(60):
                xs = 1 - mp.mpf(step)
            r = angular_mp(mode, gamma, xs)[1]
        else:
            with mp.workdps(60):
                xs = 1 + mp.mpf(step)
            r = radial_mp(mode, gamma, xs)[1]
        vals.append(r / mp.mpf(step) ** (mp.mpf(mode.m) / 2))
    return float(2 * vals[1] - vals[0])


def V_ratios(mode, gamma, probes=(4.0, 6.0, 8.0)):
    """S1 / ((-1)^n (n-m)! Ps) at each probe point; constant in x when both series are right."""
    mode = as_mode(mode)
    ratios = []
    for x in probes:
        s1 = s1_mp(mode, gamma, x)[1]
        ps = radial_mp(mode, gamma, x)[1]
        ratios.append(s1 / ((-1) ** mode.n * mp.factorial(mode.n - mode.m) * ps))
    return ratios


def V_spread(ratios):
    mean = mp.fsum(ratios) / len(ratios)
    return float((max(ratios) - min(ratios)) / abs(mean))


def V_const(mode, gamma, probes=(4.0, 6.0, 8.0), tol=1e-9):
    """V_n^m(gamma) as the x-independent ratio of the Bessel-series and Legendre-series solutions."""
    ratios = V_ratios(mode, gamma, probes)
    mean = mp.fsum(ratios) / len(ratios)
    spread = V_spread(ratios)
    if spread > tol:
        raise ConvergenceError(f"V ratio spread {spread:.3g} exceeds {tol:g}")
    return float(mean)


# ---------------------------------------------------------------------------
# checks

def ode_residual(mode, gamma, x, lam=None):
    """Relative residual of the spheroidal equation at x from oracle values.

    y and y' come from the series; y'' by a central difference of y' at a step
    far below double precision (the series are evaluated in mp).
    """
    mode = as_mode(mode)
    if 0 < abs(x) < 1e-6:
        # every term is O(x) there and y'' is lost under y' in the difference
        raise DomainError("the differenced residual needs x = 0 or |x| >= 1e-6")
    outer = x > 1
    evaluate = radial_mp if outer else angular_mp
    tab, y, _, _ = evaluate(mode, gamma, x)
    _, dy, _, _ = evaluate(mode, gamma, x, derivative=True)
    with mp.workdps(tab.dps):
        lam = tab.lam if lam is None else mp.mpf(lam)
    h = mp.mpf(10) ** (-12)
    with mp.workdps(max(tab.dps, 60)):
        xp, xm = mp.mpf(x) + h, mp.mpf(x) - h
    dyp = evaluate(mode, gamma, xp, derivative=True)[1]
    dym = evaluate(mode, gamma, xm, derivative=True)[1]
    with mp.workdps(max(tab.dps, 60)):
        x_ = mp.mpf(x)
        d2 = (dyp - dym) / (2 * h)
        w = 1 - x_ * x_
        g2 = mp.mpf(gamma) ** 2
        parts = [w * d2, -2 * x_ * dy, (lam - mp.mpf(mode.m) ** 2 / w + g2 * w) * y]
        scale = max(abs(p) for p in parts)
        return float(abs(mp.fsum(parts)) / scale) if scale else 0.0


def normalization_integral(mode, gamma, nodes=200):
    """Gauss-Legendre quadrature of Ps^2 over (-1, 1)."""
    mode = as_mode(mode)
    xs, ws = np.polynomial.legendre.leggauss(nodes)
    half = xs >= 0
    vals = {float(x): angular_series(mode, gamma, float(x)).value for x in xs[half]}
    total = 0.0
    for x, w in zip(xs, ws):
        v = vals[float(abs(x))] if x >= 0 else vals.get(float(-x))
        if v is None:
            v = angular_series(mode, gamma, float(-x)).value
        total += w * v * v
    return total
