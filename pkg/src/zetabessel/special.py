"""Special functions of real argument built on top of raw mpmath arithmetic.

Only elementary operations (exp, log, powers, trig) are taken from the
backend.  Gamma, the Bessel family, Bernoulli polynomials, Hurwitz zeta and
digamma are evaluated here by series, recurrences and asymptotic expansions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from .errors import ConvergenceError, NearIntegerOrderError, PoleError
from .precision import PrecisionContext, with_guard

_DEFAULT = PrecisionContext()


def _ctx(ctx):
    return ctx if ctx is not None else _DEFAULT


# --------------------------------------------------------------------------
# Bernoulli numbers and polynomials


@lru_cache(maxsize=None)
def _bernoulli_table(n_max: int) -> tuple[Fraction, ...]:
    # Standard recurrence sum_{j<=m} C(m+1, j) B_j = 0, B_1 = -1/2.
    b = [Fraction(1)]
    for m in range(1, n_max + 1):
        acc = Fraction(0)
        binom = 1
        for j in range(m):
            acc += binom * b[j]
            binom = binom * (m + 1 - j) // (j + 1)
        b.append(-acc / (m + 1))
    return tuple(b)


def bernoulli_number(n: int) -> Fraction:
    """Exact Bernoulli number B_n with B_1 = -1/2."""
    if n < 0:
        raise ValueError("n must be non-negative")
    size = max(64, 1 << (n.bit_length()))
    return _bernoulli_table(size)[n]


def bernoulli_poly_exact(n: int, theta: Fraction) -> Fraction:
    """B_n(theta) in exact rational arithmetic."""
    theta = Fraction(theta)
    total = Fraction(0)
    binom = 1
    for k in range(n + 1):
        total += binom * bernoulli_number(k) * theta ** (n - k)
        binom = binom * (n - k) // (k + 1)
    return total


def bernoulli_poly(n: int, theta, ctx: PrecisionContext | None = None):
    """B_n(theta) from the explicit polynomial with exact rational coefficients."""
    ctx = _ctx(ctx)
    mp = ctx.mp
    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(theta, (int, Fraction)):
        return ctx.num(bernoulli_poly_exact(n, Fraction(theta)))
    th = mp.mpf(theta)
    if th < 0 or th > 1:
        raise ValueError("theta must lie in [0, 1]")
    # Horner in theta with coefficients C(n,k) B_{n-j}.
    acc = mp.mpf(0)
    binom = 1
    coeffs = []
    for k in range(n + 1):
        coeffs.append(binom * bernoulli_number(k))
        binom = binom * (n - k) // (k + 1)
    # coeffs[k] multiplies theta^(n-k)
    for k in range(n + 1):
        c = coeffs[k]
        acc = acc * th + mp.mpf(c.numerator) / c.denominator
    return acc


# --------------------------------------------------------------------------
# Gamma and digamma


def _is_nonpositive_integer(mp, s) -> bool:
    return s <= 0 and s == mp.floor(s)


def gamma(s, ctx: PrecisionContext | None = None):
    """Gamma function of a real argument via shifted Stirling series."""
    ctx = _ctx(ctx)
    s = ctx.mp.mpf(s)
    if _is_nonpositive_integer(ctx.mp, s):
        raise PoleError(f"Gamma has a pole at s={s}")
    w = with_guard(ctx, 12)
    return ctx.mp.mpf(_gamma_work(w.mp.mpf(s), w))


def _gamma_work(s, wctx: PrecisionContext):
    return wctx.mp.mpf(_gamma_cached(wctx.mp.mpf(s)._mpf_, wctx.digits))


@lru_cache(maxsize=4096)
def _gamma_cached(s_raw, digits):
    wctx = PrecisionContext(digits, 0)
    mp = wctx.mp
    s = mp.mpf(s_raw)
    if s == mp.floor(s) and 0 < s < 200:
        return mp.mpf(math.factorial(int(s) - 1))
    if s < mp.mpf(0.5):
        # Reflection keeps the Stirling branch on the right half line.
        return mp.pi / (mp.sinpi(s) * _gamma_work(1 - s, wctx))
    return mp.exp(_loggamma_shifted(s, wctx))


def _loggamma_shifted(s, wctx: PrecisionContext):
    """log Gamma(s) for s >= 1/2."""
    mp = wctx.mp
    target = max(10, wctx.digits)
    shift = max(0, int(math.ceil(target - float(s))))
    z = s + shift
    prod = mp.mpf(1)
    for j in range(shift):
        prod *= s + j
    eps = mp.mpf(10) ** (-wctx.digits)
    series = (z - mp.mpf(0.5)) * mp.log(z) - z + mp.log(2 * mp.pi) / 2
    z2 = z * z
    zpow = z
    for k in range(1, 200):
        b = bernoulli_number(2 * k)
        term = mp.mpf(b.numerator) / (b.denominator * (2 * k) * (2 * k - 1)) / zpow
        series += term
        if abs(term) < eps:
            break
        zpow *= z2
    else:
        raise ConvergenceError("Stirling series did not converge")
    return series - mp.log(prod)


def digamma(alpha, ctx: PrecisionContext | None = None):
    """psi(alpha) for alpha > 0 via upward recurrence and the asymptotic series."""
    ctx = _ctx(ctx)
    w = with_guard(ctx, 10)
    mp = w.mp
    x = w.num(alpha)
    if x <= 0:
        raise ValueError("digamma requires alpha > 0")
    shift = max(0, int(math.ceil(w.digits - float(x))))
    acc = mp.mpf(0)
    for j in range(shift):
        acc -= 1 / (x + j)
    z = x + shift
    eps = mp.mpf(10) ** (-w.digits)
    val = mp.log(z) - 1 / (2 * z)
    z2 = z * z
    zpow = z2
    for k in range(1, 200):
        b = bernoulli_number(2 * k)
        term = mp.mpf(b.numerator) / (b.denominator * 2 * k) / zpow
        val -= term
        if abs(term) < eps:
            break
        zpow *= z2
    return ctx.mp.mpf(val + acc)


# --------------------------------------------------------------------------
# Hurwitz and Riemann zeta


class ZetaPairKind(str, Enum):
    DIFFERENCE = "difference"
    SUM = "sum"


def hurwitz_zeta(s, alpha, ctx: PrecisionContext | None = None):
    """zeta(s, alpha) for 0 < alpha <= 1 and real s != 1."""
    ctx = _ctx(ctx)
    a = ctx.mp.mpf(alpha) if not isinstance(alpha, Fraction) else ctx.num(alpha)
    if not 0 < a <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    return hurwitz_zeta_general(s, alpha, ctx)


def hurwitz_zeta_general(s, alpha, ctx: PrecisionContext | None = None):
    """zeta(s, alpha) for any alpha > 0 (used for tails of Dirichlet series)."""
    ctx = _ctx(ctx)
    mp = ctx.mp
    s_val = mp.mpf(s)
    if s_val == 1:
        raise PoleError("Hurwitz zeta has a pole at s=1")
    if _is_nonpositive_integer(mp, s_val):
        n = int(-s_val)
        if isinstance(alpha, (int, Fraction)):
            return ctx.num(-bernoulli_poly_exact(n + 1, Fraction(alpha)) / (n + 1))
        a = mp.mpf(alpha)
        if a <= 1:
            return -bernoulli_poly(n + 1, a, ctx) / (n + 1)
        # Shift down to (0, 1] with the defining recurrence.
        m = int(mp.ceil(a)) - 1
        base = a - m
        val = -bernoulli_poly(n + 1, base, with_guard(ctx, 10)) / (n + 1)
        for j in range(m):
            val -= (base + j) ** n
        return mp.mpf(val)
    return mp.mpf(_hurwitz_em(s_val, alpha, ctx))


def _hurwitz_em(s, alpha, ctx: PrecisionContext):
    d = ctx.digits
    m_base = max(d, int(math.ceil(10 * abs(float(s)))))
    extra = 10 + int(max(0.0, 1.0 - float(s)) * math.log10(m_base + 2)) + 1
    w = with_guard(ctx, extra)
    mp = w.mp
    s = mp.mpf(s)
    a = w.num(alpha) if isinstance(alpha, Fraction) else mp.mpf(alpha)
    if a <= 0:
        raise ValueError("alpha must be positive")
    n_direct = max(0, m_base - int(mp.floor(a)))
    total = mp.mpf(0)
    for n in range(n_direct):
        total += (n + a) ** (-s)
    big = a + n_direct
    total += big ** (1 - s) / (s - 1) + big ** (-s) / 2
    eps = mp.mpf(10) ** (-w.digits)
    scale = abs(total) + abs(big ** (-s))
    poch = s  # (s)_{2k-1}
    bpow = big ** (-s - 1)
    inv2 = 1 / (big * big)
    fact = mp.mpf(2)  # (2k)!
    prev = None
    for k in range(1, 400):
        b = bernoulli_number(2 * k)
        term = mp.mpf(b.numerator) / b.denominator / fact * poch * bpow
        total += term
        if abs(term) <= eps * scale:
            break
        if prev is not None and abs(term) > abs(prev) and k > 10:
            raise ConvergenceError("Euler-Maclaurin tail diverging", {"s": str(s), "k": k})
        prev = term
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        bpow *= inv2
        fact *= (2 * k + 1) * (2 * k + 2)
    else:
        raise ConvergenceError("Euler-Maclaurin correction did not converge")
    return total


def riemann_zeta(s, ctx: PrecisionContext | None = None):
    return hurwitz_zeta(s, 1, ctx)


def zeta_pair(s, theta, kind=ZetaPairKind.DIFFERENCE, ctx: PrecisionContext | None = None):
    """zeta(s, theta) -/+ zeta(s, 1-theta); the s=1 difference is pi*cot(pi*theta)."""
    ctx = _ctx(ctx)
    mp = ctx.mp
    kind = ZetaPairKind(kind)
    th = ctx.num(theta) if isinstance(theta, Fraction) else mp.mpf(theta)
    if not 0 < th < 1:
        raise ValueError("theta must lie in (0, 1)")
    comp = (1 - theta) if isinstance(theta, Fraction) else 1 - th
    s_val = mp.mpf(s)
    if s_val == 1:
        if kind is ZetaPairKind.SUM:
            raise PoleError("zeta(1,t)+zeta(1,1-t) is divergent")
        return mp.pi * mp.cot(mp.pi * th)
    a = hurwitz_zeta(s_val, theta, ctx)
    b = hurwitz_zeta(s_val, comp, ctx)
    return a - b if kind is ZetaPairKind.DIFFERENCE else a + b


# --------------------------------------------------------------------------
# Bessel functions


@dataclass(frozen=True)
class BesselOrder:
    """Real Bessel order; ``near_integer`` is decided against a precision."""

    nu: object

    def value(self, ctx: PrecisionContext):
        return ctx.num(self.nu) if isinstance(self.nu, Fraction) else ctx.mp.mpf(self.nu)

    def near_integer(self, ctx: PrecisionContext) -> bool:
        mp = ctx.mp
        v = mp.mpf(self.nu)
        return abs(v - mp.nint(v)) < mp.mpf(10) ** (-(ctx.digits / 2.0))


def _order(nu, ctx):
    if isinstance(nu, BesselOrder):
        return nu.value(ctx)
    if isinstance(nu, Fraction):
        return ctx.num(nu)
    return ctx.mp.mpf(nu)


def bessel_crossover(ctx: PrecisionContext) -> float:
    """Argument above which the large-z asymptotic expansions are used."""
    return max(30.0, 1.2 * (ctx.digits + 4))


def _series_I_or_J(nu, z, wctx: PrecisionContext, sign: int):
    """sum_n sign^n (z/2)^{nu+2n} / (n! Gamma(nu+n+1))."""
    mp = wctx.mp
    if _is_nonpositive_integer(mp, nu + 1) or (nu < 0 and nu == mp.floor(nu)):
        # 1/Gamma vanishes for the leading terms; I_{-n} = I_n, J_{-n} = (-1)^n J_n.
        n = int(-nu)
        val = _series_I_or_J(mp.mpf(n), z, wctx, sign)
        return val if sign > 0 or n % 2 == 0 else -val
    half = z / 2
    term = half ** nu / _gamma_work(nu + 1, wctx)
    q = half * half
    total = term
    eps = mp.mpf(10) ** (-wctx.digits)
    peak = abs(term)
    for n in range(1, 100000):
        term = term * q / (n * (nu + n))
        if sign < 0:
            term = -term
        total += term
        at = abs(term)
        if at > peak:
            peak = at
        if n > float(half) and at <= eps * max(abs(total), peak * eps):
            break
    else:
        raise ConvergenceError("Bessel power series did not converge")
    return total


def _hankel_coeffs(nu, z, mp, eps):
    """Terms a_k(nu)/z^k of the Hankel expansion, stopped at ``eps``."""
    mu = 4 * nu * nu
    terms = [mp.mpf(1)]
    term = mp.mpf(1)
    k = 1
    while True:
        term = term * (mu - (2 * k - 1) ** 2) / (8 * k * z)
        if term == 0:
            break
        if abs(term) > abs(terms[-1]) and k > float(abs(nu)) + 1:
            raise ConvergenceError("asymptotic expansion diverged before reaching tolerance",
                                   {"z": str(z), "nu": str(nu)})
        terms.append(term)
        if abs(term) < eps:
            break
        k += 1
        if k > 100000:
            raise ConvergenceError("asymptotic expansion too long")
    return terms


def _K_asymptotic(nu, z, wctx, target_digits):
    mp = wctx.mp
    eps = mp.mpf(10) ** (-(target_digits + 2))
    terms = _hankel_coeffs(nu, z, mp, eps)
    return mp.sqrt(mp.pi / (2 * z)) * mp.exp(-z) * mp.fsum(terms)


def _JY_asymptotic(nu, z, wctx, target_digits):
    mp = wctx.mp
    eps = mp.mpf(10) ** (-(target_digits + 2))
    terms = _hankel_coeffs(nu, z, mp, eps)
    P = mp.mpf(0)
    Q = mp.mpf(0)
    for k, t in enumerate(terms):
        sgn = -1 if (k // 2) % 2 else 1
        if k % 2 == 0:
            P += sgn * t
        else:
            Q += sgn * t
    omega = z - (nu / 2 + mp.mpf(0.25)) * mp.pi
    amp = mp.sqrt(2 / (mp.pi * z))
    c, s = mp.cos(omega), mp.sin(omega)
    return amp * (P * c - Q * s), amp * (P * s + Q * c)


def _near_integer_average(fn, nu, z, ctx: PrecisionContext):
    """Richardson combination of symmetric averages at nu +- h, nu +- 2h."""
    w = with_guard(ctx, ctx.digits // 3 + 10)
    mp = w.mp
    h = mp.mpf(10) ** (-(ctx.digits // 3))
    nu = mp.mpf(nu)
    a1 = (fn(nu + h, z, w) + fn(nu - h, z, w)) / 2
    a2 = (fn(nu + 2 * h, z, w) + fn(nu - 2 * h, z, w)) / 2
    return ctx.mp.mpf((4 * a1 - a2) / 3)


def _check_z(z, mp):
    if not z > 0:
        raise ValueError("z must be positive")


def bessel_I(nu, z, ctx: PrecisionContext | None = None):
    """Modified Bessel I_nu(z) by its power series."""
    ctx = _ctx(ctx)
    v = _order(nu, ctx)
    zz = ctx.mp.mpf(z)
    _check_z(zz, ctx.mp)
    w = with_guard(ctx, 10)
    return ctx.mp.mpf(_series_I_or_J(w.mp.mpf(v), w.mp.mpf(zz), w, +1))


def _K_series(nu, z, wctx):
    # pi/2 (I_{-nu} - I_nu)/sin(pi nu); caller supplies enough guard digits.
    mp = wctx.mp
    return mp.pi / 2 * (_series_I_or_J(-nu, z, wctx, +1) - _series_I_or_J(nu, z, wctx, +1)) / mp.sinpi(nu)


def _K_raw(nu, z, wctx):
    mp = wctx.mp
    sin_nu = abs(mp.sinpi(nu))
    loss = 2 * float(z) / math.log(10) + max(0.0, -math.log10(float(sin_nu) + 1e-300))
    inner = with_guard(wctx, int(loss) + 5)
    return _K_series(inner.mp.mpf(nu), inner.mp.mpf(z), inner)


def bessel_K(nu, z, ctx: PrecisionContext | None = None, allow_limit: bool = True):
    """Macdonald function K_nu(z), symmetric in the order by construction."""
    ctx = _ctx(ctx)
    mp = ctx.mp
    v = abs(_order(nu, ctx))
    zz = mp.mpf(z)
    _check_z(zz, mp)
    w = with_guard(ctx, ctx.guard_digits)
    if float(zz) >= bessel_crossover(ctx):
        return mp.mpf(_K_asymptotic(w.mp.mpf(v), w.mp.mpf(zz), w, ctx.digits))
    if v == mp.nint(v) or BesselOrder(v).near_integer(ctx):
        if not allow_limit:
            raise NearIntegerOrderError(f"order {v} is within 10^(-digits/2) of an integer")
        return _near_integer_average(_K_raw, v, zz, w)
    return mp.mpf(_K_raw(w.mp.mpf(v), w.mp.mpf(zz), w))


def _J_raw(nu, z, wctx):
    loss = float(z) / math.log(10)
    inner = with_guard(wctx, int(loss) + 5)
    return _series_I_or_J(inner.mp.mpf(nu), inner.mp.mpf(z), inner, -1)


def bessel_J(nu, z, ctx: PrecisionContext | None = None):
    """Bessel J_nu(z): power series below the crossover, Hankel expansion above."""
    ctx = _ctx(ctx)
    mp = ctx.mp
    v = _order(nu, ctx)
    zz = mp.mpf(z)
    _check_z(zz, mp)
    w = with_guard(ctx, ctx.guard_digits)
    if float(zz) >= bessel_crossover(ctx):
        return mp.mpf(_JY_asymptotic(w.mp.mpf(v), w.mp.mpf(zz), w, ctx.digits)[0])
    return mp.mpf(_J_raw(w.mp.mpf(v), w.mp.mpf(zz), w))


def _Y_raw(nu, z, wctx):
    mp = wctx.mp
    sin_nu = abs(mp.sinpi(nu))
    loss = float(z) / math.log(10) + max(0.0, -math.log10(float(sin_nu) + 1e-300))
    inner = with_guard(wctx, int(loss) + 5)
    m = inner.mp
    v = m.mpf(nu)
    zz = m.mpf(z)
    jp = _series_I_or_J(v, zz, inner, -1)
    jm = _series_I_or_J(-v, zz, inner, -1)
    return (jp * m.cospi(v) - jm) / m.sinpi(v)


def bessel_Y(nu, z, ctx: PrecisionContext | None = None, allow_limit: bool = True):
    """Bessel Y_nu(z) from the J combination, or the Hankel expansion for large z."""
    ctx = _ctx(ctx)
    mp = ctx.mp
    v = _order(nu, ctx)
    zz = mp.mpf(z)
    _check_z(zz, mp)
    w = with_guard(ctx, ctx.guard_digits)
    if float(zz) >= bessel_crossover(ctx):
        return mp.mpf(_JY_asymptotic(w.mp.mpf(v), w.mp.mpf(zz), w, ctx.digits)[1])
    if v == mp.nint(v) or BesselOrder(v).near_integer(ctx):
        if not allow_limit:
            raise NearIntegerOrderError(f"order {v} is within 10^(-digits/2) of an integer")
        return _near_integer_average(_Y_raw, v, zz, w)
    return mp.mpf(_Y_raw(w.mp.mpf(v), w.mp.mpf(zz), w))


def bessel_M(nu, z, ctx: PrecisionContext | None = None, allow_limit: bool = True):
    """M_nu(z) = -Y_nu(z) - (2/pi) K_nu(z)."""
    ctx = _ctx(ctx)
    mp = ctx.mp
    return -bessel_Y(nu, z, ctx, allow_limit) - 2 / mp.pi * bessel_K(nu, z, ctx, allow_limit)


def bessel_JYK(nu, z, ctx: PrecisionContext | None = None):
    """J, Y and K at one point, sharing the J series between J and Y."""
    ctx = _ctx(ctx)
    mp = ctx.mp
    v = _order(nu, ctx)
    zz = mp.mpf(z)
    _check_z(zz, mp)
    w = with_guard(ctx, ctx.guard_digits)
    if float(zz) >= bessel_crossover(ctx):
        wv, wz = w.mp.mpf(v), w.mp.mpf(zz)
        j, y = _JY_asymptotic(wv, wz, w, ctx.digits)
        k = _K_asymptotic(abs(wv), wz, w, ctx.digits)
        return mp.mpf(j), mp.mpf(y), mp.mpf(k)
    return bessel_J(v, zz, ctx), bessel_Y(v, zz, ctx), bessel_K(v, zz, ctx)
