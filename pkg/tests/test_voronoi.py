from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from zetabessel.errors import HypothesisError, QuadratureError
from zetabessel.identities import IdentityCase, evaluate_lhs, evaluate_rhs
from zetabessel.precision import PrecisionContext
from zetabessel.special import bessel_J, bessel_K, bessel_Y
from zetabessel.voronoi import (
    TestFunction,
    VoronoiKernel,
    kernel_integral,
    modified_derivatives,
    product_lattice,
    quadrature,
)

VBASE = {"nu": "0.25", "alpha": "0.6", "beta": "3.4", "f": "exp_decay:1"}


def test_quadrature_trivial(ctx30):
    mp = ctx30.mp
    assert abs(quadrature(lambda t: mp.mpf(1), mp.mpf("0.5"), mp.mpf("2.5"), mp.mpf("1e-28"), ctx30) - 2) < mp.mpf("1e-28")
    assert abs(quadrature(lambda t: t**3, mp.mpf(0), mp.mpf(1), mp.mpf("1e-28"), ctx30) - mp.mpf(1) / 4) < mp.mpf("1e-28")


def test_quadrature_subdivision_limit(ctx30):
    mp = ctx30.mp
    with pytest.raises(QuadratureError):
        quadrature(lambda t: mp.sin(1 / t), mp.mpf("1e-12"), mp.mpf(1), mp.mpf("1e-28"), ctx30, max_depth=3)


def test_quadrature_oscillatory_bessel_reference(ctx30):
    mp = ctx30.mp
    nu = mp.mpf("0.25")
    val = quadrature(lambda t: mp.exp(-t) * bessel_J(nu, 4 * mp.pi * mp.sqrt(t), ctx30),
                     mp.mpf("0.6"), mp.mpf("3.4"), mp.mpf("1e-25"), ctx30)
    with mpmath.workdps(40):
        pts = mpmath.linspace(mpmath.mpf("0.6"), mpmath.mpf("3.4"), 200)
        ref = mpmath.quad(lambda t: mpmath.exp(-t) * mpmath.besselj(mpmath.mpf("0.25"), 4 * mpmath.pi * mpmath.sqrt(t)), pts)
    assert abs(val - ref) < mpmath.mpf("1e-24")


def test_test_function_parsing():
    assert TestFunction.parse("exp_decay:2").tag == "exp_decay"
    assert TestFunction.parse("polynomial:1,0,3").tag == "polynomial"
    with pytest.raises(HypothesisError):
        TestFunction.parse("sinc:1")


@pytest.mark.parametrize("spec", ["exp_decay:1.5", "polynomial:1,-2,0.5,3", "gaussian:1.7,0.6"])
def test_test_function_derivatives(ctx30, spec):
    mp = ctx30.mp
    f = TestFunction.parse(spec)
    t = mp.mpf("1.3")
    ders = f.derivatives(t, 4, mp)
    for j in range(5):
        assert abs(ders[j] - mp.diff(lambda s: f.value(s, mp), t, j)) < mp.mpf("1e-20")


def test_modified_derivatives(ctx30):
    mp = ctx30.mp
    f = TestFunction.parse("exp_decay:1")
    t, p = mp.mpf("1.7"), mp.mpf("0.625")
    ders = modified_derivatives(f, t, p, 3, mp)
    for j in range(4):
        assert abs(ders[j] - mp.diff(lambda s: mp.exp(-s) * s ** (-p), t, j)) < mp.mpf("1e-20")


def test_kernel_identity(ctx30):
    mp = ctx30.mp
    for nu in ("0.25", "0.4", "-0.3"):
        v = mp.mpf(nu)
        Z, W = VoronoiKernel.Z(v, mp), VoronoiKernel.W(v, mp)
        s, c = mp.sinpi(v / 2), mp.cospi(v / 2)
        for y in mp.linspace(mp.mpf("0.5"), mp.mpf(40), 10):
            J, Y, K = bessel_J(v, y, ctx30), bessel_Y(v, y, ctx30), bessel_K(v, y, ctx30)
            total = Z.value(v, y, ctx30) + W.value(v, y, ctx30)
            expected = 2 / mp.pi * K * (s + c) + Y * (s - c) - J * (s + c)
            assert abs(total - expected) <= mp.mpf(10) ** (-30 + 5)


def test_kernel_downward_recurrence(ctx30):
    mp = ctx30.mp
    v, y = mp.mpf("0.25"), mp.mpf(17)
    k = VoronoiKernel.W_plus(v, mp)
    shifted = k.shifted(v, y, 5, ctx30)
    for i, val in enumerate(shifted, start=1):
        assert abs(val - k.value(v - i, y, ctx30)) < mp.mpf("1e-24")


@pytest.mark.parametrize("lam", [Fraction(1, 3), Fraction(2, 3), Fraction(50), Fraction(700, 3)])
def test_kernel_integral_reference(ctx30, lam):
    mp = ctx30.mp
    nu = mp.mpf("0.25")
    f = TestFunction.parse("exp_decay:1")
    lv = mp.mpf(lam.numerator) / lam.denominator
    val, method = kernel_integral(f, 0, lv, nu, VoronoiKernel.Z(nu, mp), mp.mpf("0.6"), mp.mpf("3.4"),
                                  ctx30, mp.mpf("1e-24"))
    with mpmath.workdps(40):
        n = mpmath.mpf("0.25")
        s, c = mpmath.sinpi(n / 2), mpmath.cospi(n / 2)
        L = mpmath.mpf(lam.numerator) / lam.denominator

        def g(t):
            y = 4 * mpmath.pi * mpmath.sqrt(L * t)
            z = (2 / mpmath.pi * mpmath.besselk(n, y) + mpmath.bessely(n, y)) * s - mpmath.besselj(n, y) * c
            return mpmath.exp(-t) * t ** (-n / 2) * z

        ref = mpmath.quad(g, mpmath.linspace(mpmath.mpf("0.6"), mpmath.mpf("3.4"), 60), method="gauss-legendre")
    assert abs(val - ref) < mpmath.mpf("1e-22")
    if lam >= 50:
        assert method == "boundary"


def test_product_lattice_counts(ctx30):
    mp = ctx30.mp
    pair = [(Fraction(1, 3), 1), (Fraction(2, 3), -1)]
    pts = product_lattice(10, [(Fraction(1), 1)], pair, mp.mpf("0.25"), 1, mp)
    direct = {}
    for n in range(1, 31):
        for b, sb in pair:
            for m in range(0, 31):
                lam = n * (m + b)
                if lam <= 10:
                    v = m + b
                    direct[lam] = direct.get(lam, 0) + sb * (mp.mpf(v.numerator) / v.denominator / n) ** mp.mpf("0.125")
    assert set(pts) == set(direct)
    assert all(abs(pts[k] - direct[k]) < mp.mpf("1e-28") for k in pts)


def test_voronoi_lhs_empty_interval(ctx30):
    val, _ = evaluate_lhs(IdentityCase("V_SIN_D", dict(VBASE, alpha="1.2", beta="1.8", theta="1/3")), None, ctx30)
    assert val == 0


def test_voronoi_lhs_single_term(ctx30):
    mp = ctx30.mp
    val, _ = evaluate_lhs(IdentityCase("V_SIN_D", dict(VBASE, alpha="0.5", beta="1.5", theta="1/3")), None, ctx30)
    assert abs(val - mp.sinpi(mp.mpf(2) / 3) * mp.exp(-1)) < mp.mpf("1e-29")


def test_voronoi_lhs_three_terms(ctx30):
    mp = ctx30.mp
    val, _ = evaluate_lhs(IdentityCase("V_SIN_D", dict(VBASE, alpha="0.5", beta="3.5", theta="1/3")), None, ctx30)
    nu = mp.mpf("0.25")
    ref = mp.mpf(0)
    for j in (1, 2, 3):
        for d in range(1, j + 1):
            if j % d == 0:
                ref += d ** (-nu) * mp.sin(2 * mp.pi * d / 3) * mp.exp(-j)
    assert abs(val - ref) < mp.mpf("1e-29")


def test_voronoi_sine_rhs_vanishes_at_half(ctx30):
    val, _ = evaluate_rhs(IdentityCase("V_SIN_D", dict(VBASE, theta="1/2", cutoff=50)), None, ctx30)
    assert val == 0


def test_voronoi_tail_window(ctx30):
    # the extrapolated tail at cutoff X agrees with the one at 4X within the reported bound
    mp = ctx30.mp
    case = lambda X: IdentityCase("V_SIN_D", dict(VBASE, theta="1/3", cutoff=X))
    v1, e1 = evaluate_rhs(case(50), None, ctx30)
    v2, e2 = evaluate_rhs(case(200), None, ctx30)
    assert abs(v1 - v2) <= e1.bound + e2.bound
    assert e2.bound < e1.bound


@settings(max_examples=10, deadline=None)
@given(st.fractions(Fraction(1, 10), Fraction(49, 10)), st.fractions(Fraction(1, 10), Fraction(2)))
def test_interval_checks(alpha, width):
    beta = alpha + width
    params = dict(VBASE, alpha=str(alpha), beta=str(beta), theta="1/3")
    ctx = PrecisionContext(20)
    if alpha.denominator == 1 or beta.denominator == 1:
        with pytest.raises(HypothesisError):
            evaluate_lhs(IdentityCase("V_SIN_D", params), None, ctx)
    else:
        val, _ = evaluate_lhs(IdentityCase("V_SIN_D", params), None, ctx)
        if int(alpha) == int(beta):
            assert val == 0
