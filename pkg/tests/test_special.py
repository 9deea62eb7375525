from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from zetabessel.errors import NearIntegerOrderError, PoleError
from zetabessel.precision import PrecisionContext
from zetabessel import special
from zetabessel.special import (
    ZetaPairKind,
    bernoulli_poly,
    bessel_I,
    bessel_J,
    bessel_K,
    bessel_M,
    bessel_Y,
    digamma,
    gamma,
    hurwitz_zeta,
    riemann_zeta,
    zeta_pair,
)


def close(a, b, tol):
    return abs(mpmath.mpf(a) - mpmath.mpf(b)) <= mpmath.mpf(tol)


# gamma / digamma

@pytest.mark.parametrize("s,expected", [(1, 1), (5, 24)])
def test_gamma_integers(ctx40, s, expected):
    assert close(gamma(s, ctx40), expected, "1e-38")


def test_gamma_half(ctx40):
    assert close(gamma(ctx40.num(Fraction(1, 2)), ctx40), ctx40.mp.sqrt(ctx40.mp.pi), "1e-38")


@pytest.mark.parametrize("s", [0, -1, -3])
def test_gamma_poles(ctx40, s):
    with pytest.raises(PoleError):
        gamma(s, ctx40)


@settings(max_examples=25, deadline=None)
@given(st.fractions(Fraction(1, 20), Fraction(6)))
def test_gamma_duplication(s):
    ctx = PrecisionContext(30)
    mp = ctx.mp
    x = ctx.num(s)
    lhs = gamma(x, ctx) * gamma(x + mp.mpf(1) / 2, ctx)
    rhs = 2 ** (1 - 2 * x) * mp.sqrt(mp.pi) * gamma(2 * x, ctx)
    assert abs(lhs - rhs) <= mp.mpf("1e-27") * abs(rhs)


def test_digamma_one_matches_harmonic_oracle(ctx40):
    # gamma = H_n - log n - 1/(2n) + 1/(12 n^2) - 1/(120 n^4) + ..., independent of the package
    with mpmath.workdps(60):
        n = 10**4
        h = mpmath.fsum(mpmath.mpf(1) / j for j in range(1, n + 1))
        euler = h - mpmath.log(n) - mpmath.mpf(1) / (2 * n) + mpmath.mpf(1) / (12 * n**2) \
            - mpmath.mpf(1) / (120 * n**4) + mpmath.mpf(1) / (252 * n**6)
    assert close(digamma(1, ctx40), -euler, "1e-35")


def test_digamma_reflection(ctx40):
    d = digamma(ctx40.num(Fraction(3, 4)), ctx40) - digamma(ctx40.num(Fraction(1, 4)), ctx40)
    assert close(d, ctx40.mp.pi, "1e-37")
    assert close(d, zeta_pair(1, Fraction(1, 4), ZetaPairKind.DIFFERENCE, ctx40), "1e-37")


def test_digamma_recurrence(ctx40):
    assert close(digamma(2, ctx40) - digamma(1, ctx40), 1, "1e-38")


# Bernoulli

def test_bernoulli_small(ctx40):
    assert bernoulli_poly(0, ctx40.mp.mpf("0.37"), ctx40) == 1
    assert close(bernoulli_poly(1, Fraction(1, 2), ctx40), 0, "1e-40")
    t = Fraction(1, 5)
    d = bernoulli_poly(3, t, ctx40) - bernoulli_poly(3, 1 - t, ctx40)
    # B3(t) - B3(1-t) = 2 B3(t) = t - 3t^2 + 2t^3 at t = 0.2 ... times 1
    assert close(d, ctx40.mp.mpf("0.096"), "1e-38")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 12), st.fractions(Fraction(0), Fraction(1)))
def test_bernoulli_reflection(n, t):
    ctx = PrecisionContext(30)
    assert close(bernoulli_poly(n, 1 - t, ctx), (-1) ** n * bernoulli_poly(n, t, ctx), "1e-26")


# zeta

def test_hurwitz_examples(ctx40):
    mp = ctx40.mp
    assert close(hurwitz_zeta(0, Fraction(1, 4), ctx40), mp.mpf("0.25"), "1e-39")
    assert close(hurwitz_zeta(2, 1, ctx40), mp.pi**2 / 6, "1e-38")
    d = hurwitz_zeta(3, Fraction(1, 4), ctx40) - hurwitz_zeta(3, Fraction(3, 4), ctx40)
    assert close(d, 2 * mp.pi**3, "1e-36")


def test_hurwitz_pole(ctx40):
    with pytest.raises(PoleError):
        hurwitz_zeta(1, Fraction(1, 3), ctx40)


@settings(max_examples=25, deadline=None)
@given(st.fractions(Fraction(-3), Fraction(5)).filter(lambda s: s != 1),
       st.fractions(Fraction(1, 50), Fraction(1)))
def test_hurwitz_against_mpmath(s, a):
    ctx = PrecisionContext(30)
    with mpmath.workdps(50):
        ref = mpmath.zeta(mpmath.mpf(s.numerator) / s.denominator, mpmath.mpf(a.numerator) / a.denominator)
    val = hurwitz_zeta(ctx.num(s), a, ctx)
    assert abs(val - ref) <= mpmath.mpf("1e-25") * max(1, abs(ref))


@pytest.mark.parametrize("s,expected", [(0, "-0.5"), (-2, "0")])
def test_riemann_zeta_values(ctx40, s, expected):
    assert close(riemann_zeta(s, ctx40), expected, "1e-39")


def test_riemann_zeta_two(ctx40):
    assert close(riemann_zeta(2, ctx40), ctx40.mp.pi**2 / 6, "1e-38")


@pytest.mark.parametrize("s", ["0.3", "1.7", "2.5", "-0.6"])
def test_riemann_functional_equation(ctx40, s):
    mp = ctx40.mp
    s = mp.mpf(s)
    lhs = gamma(s, ctx40) * riemann_zeta(s, ctx40)
    rhs = mp.pi**s * riemann_zeta(1 - s, ctx40) / (2 ** (1 - s) * mp.cos(mp.pi * s / 2))
    assert abs(lhs - rhs) <= mp.mpf("1e-35") * abs(rhs)


def test_zeta_pair(ctx40):
    mp = ctx40.mp
    assert close(zeta_pair(1, Fraction(1, 4), "difference", ctx40), mp.pi, "1e-38")
    t = Fraction(2, 7)
    assert close(zeta_pair(0, t, "difference", ctx40), ctx40.num(1 - 2 * t), "1e-38")
    assert zeta_pair(mp.mpf("2.5"), Fraction(1, 2), "difference", ctx40) == 0
    with pytest.raises(PoleError):
        zeta_pair(1, Fraction(1, 3), "sum", ctx40)


# Bessel

@pytest.mark.parametrize("z", ["0.5", "1", "2", "5", "10"])
def test_K_half_closed_form(z):
    ctx = PrecisionContext(60)
    mp = ctx.mp
    z = mp.mpf(z)
    assert abs(bessel_K(Fraction(1, 2), z, ctx) - mp.sqrt(mp.pi / (2 * z)) * mp.exp(-z)) <= mp.mpf("1e-55")


def test_K_integral_representation(ctx40):
    with mpmath.workdps(50):
        ref = mpmath.quad(lambda t: mpmath.exp(-mpmath.cosh(t)) * mpmath.cosh(mpmath.mpf("0.3") * t), [0, 2, 5, 12])
    assert close(bessel_K("0.3", 1, ctx40), ref, "1e-36")
    assert bessel_K("-0.3", 1, ctx40) == bessel_K("0.3", 1, ctx40)


def test_I_examples(ctx40):
    mp = ctx40.mp
    assert close(bessel_I(0, mp.mpf("1e-30"), ctx40), 1, "1e-38")
    z = mp.mpf("0.1")
    ref = sum((z / 2) ** (1 + 2 * n) / (mp.factorial(n) * mp.factorial(n + 1)) for n in range(10))
    assert close(bessel_I(1, z, ctx40), ref, "1e-38")
    assert close(bessel_I("0.5", 1, ctx40), mp.sinh(1) * mp.sqrt(2 / mp.pi), "1e-38")


def test_J_examples(ctx40):
    mp = ctx40.mp
    assert close(bessel_J(0, mp.mpf("1e-30"), ctx40), 1, "1e-38")
    assert close(bessel_J("0.5", mp.pi, ctx40), 0, "1e-37")


def test_J_series_matches_asymptotic():
    # two internal methods on either side of the crossover machinery
    ctx = PrecisionContext(40)
    w = PrecisionContext(60)
    z = w.mp.mpf(60)
    series = special._J_raw(w.mp.mpf("0.25"), z, w)
    asym = special._JY_asymptotic(w.mp.mpf("0.25"), z, w, 40)[0]
    assert abs(series - asym) <= mpmath.mpf("1e-20")
    assert close(bessel_J("0.25", 60, ctx), series, "1e-36")


def test_Y_examples(ctx40):
    mp = ctx40.mp
    assert close(bessel_Y("0.5", mp.pi / 2, ctx40), 0, "1e-37")
    with mpmath.workdps(50):
        nu = mpmath.mpf("0.3")
        f1 = mpmath.quad(lambda t: mpmath.sin(2 * mpmath.sin(t) - nu * t), [0, mpmath.pi]) / mpmath.pi
        f2 = mpmath.quad(lambda t: (mpmath.exp(nu * t) + mpmath.exp(-nu * t) * mpmath.cospi(nu))
                         * mpmath.exp(-2 * mpmath.sinh(t)), [0, 2, 6, 20]) / mpmath.pi
        ref = f1 - f2
    assert close(bessel_Y("0.3", 2, ctx40), ref, "1e-35")
    assert bessel_Y("0.3", mp.mpf("1e-3"), ctx40) < 0


def test_near_integer_guard(ctx40):
    with pytest.raises(NearIntegerOrderError):
        bessel_K(1, 2, ctx40, allow_limit=False)
    with mpmath.workdps(50):
        ref = mpmath.besselk(1, 2)
    assert close(bessel_K(1, 2, ctx40), ref, "1e-25")


def test_M_composition(ctx40):
    mp = ctx40.mp
    m = bessel_M("0.5", 1, ctx40)
    assert close(m, -bessel_Y("0.5", 1, ctx40) - 2 / mp.pi * bessel_K("0.5", 1, ctx40), "1e-38")
    assert mp.isfinite(bessel_M("0.3", 5, ctx40))
    hi = PrecisionContext(60)
    assert close(m, bessel_M("0.5", 1, hi), "1e-35")


@settings(max_examples=25, deadline=None)
@given(st.fractions(Fraction(1, 10), Fraction(19, 10)).filter(lambda v: v.denominator != 1),
       st.fractions(Fraction(1, 10), Fraction(40)))
def test_K_recurrence(nu, z):
    ctx = PrecisionContext(30)
    mp = ctx.mp
    v, x = ctx.num(nu), ctx.num(z)
    lhs = bessel_K(v + 1, x, ctx) - bessel_K(v - 1, x, ctx)
    rhs = 2 * v / x * bessel_K(v, x, ctx)
    assert abs(lhs - rhs) <= mp.mpf("1e-25") * abs(bessel_K(v + 1, x, ctx))


@settings(max_examples=20, deadline=None)
@given(st.fractions(Fraction(1, 10), Fraction(19, 10)).filter(lambda v: v.denominator != 1),
       st.fractions(Fraction(1, 10), Fraction(80)))
def test_bessel_against_mpmath(nu, z):
    ctx = PrecisionContext(30)
    v, x = ctx.num(nu), ctx.num(z)
    with mpmath.workdps(50):
        refs = [mpmath.besselj(v, x), mpmath.bessely(v, x), mpmath.besselk(v, x)]
    vals = [bessel_J(v, x, ctx), bessel_Y(v, x, ctx), bessel_K(v, x, ctx)]
    for val, ref in zip(vals, refs):
        assert abs(val - ref) <= mpmath.mpf("1e-25") * max(abs(ref), mpmath.mpf("1e-3"))
