import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from zetabessel.characters import (
    dirichlet_L,
    enumerate_characters,
    euler_phi,
    exact_character_orthogonality,
    gauss_factorization,
    gauss_sum,
    trig_from_characters,
)
from zetabessel.errors import GcdError, PoleError
from zetabessel.precision import PrecisionContext
from zetabessel.special import gamma


def close(a, b, tol):
    return abs(a - b) <= mpmath.mpf(tol)


def test_modulus_one():
    g = enumerate_characters(1)
    assert len(g.characters) == 1
    chi = g.characters[0]
    assert chi.is_principal and chi.parity == "even"


def test_modulus_four(ctx40):
    g = enumerate_characters(4)
    assert len(g.characters) == 2
    odd = g.odd()
    assert len(odd) == 1 and g.principal().parity == "even"
    assert close(odd[0](3, ctx40), -1, "1e-40")


def test_modulus_five():
    g = enumerate_characters(5)
    assert len(g.characters) == 4
    assert len(g.even()) == 2 and len(g.odd()) == 2
    assert len(g.primitive()) == 3


@pytest.mark.parametrize("q", range(1, 61))
def test_group_size_and_multiplicativity(q):
    g = enumerate_characters(q)
    assert len(g.characters) == euler_phi(q) == g.phi
    for chi in g.characters:
        for m in range(1, 2 * q):
            for n in (1, 2, 3, q - 1 if q > 1 else 1):
                a, b, c = chi.angle(m), chi.angle(n), chi.angle(m * n)
                if a is None or b is None:
                    assert c is None
                else:
                    assert c == (a + b) % 1


def test_gauss_sums_small(ctx40):
    mp = ctx40.mp
    assert close(gauss_sum(enumerate_characters(1).characters[0], ctx40), 1, "1e-40")
    chi4 = enumerate_characters(4).odd()[0]
    assert close(gauss_sum(chi4, ctx40), mp.mpc(0, 2), "1e-39")


@pytest.mark.parametrize("q", range(3, 51))
def test_gauss_product_primitive(q):
    ctx = PrecisionContext(60)
    mp = ctx.mp
    for chi in enumerate_characters(q).primitive():
        prod = gauss_sum(chi, ctx) * gauss_sum(chi.conjugate(), ctx)
        sign = 1 if chi.parity == "even" else -1
        assert abs(prod - sign * q) <= mp.mpf("1e-40")
        assert abs(abs(gauss_sum(chi, ctx)) ** 2 - q) <= mp.mpf("1e-40")


def test_gauss_factorization(ctx40):
    mp = ctx40.mp
    assert close(gauss_factorization(enumerate_characters(1).characters[0], 7, ctx40), 1, "1e-40")
    chi4 = enumerate_characters(4).odd()[0]
    direct = sum(mp.conj(chi4(h, ctx40)) * mp.expjpi(2 * mp.mpf(3 * h) / 4) for h in (1, 3))
    assert close(gauss_factorization(chi4, 3, ctx40), direct, "1e-39")
    # chi(3) tau(conj chi) = (-1)(2i)
    assert close(direct, mp.mpc(0, -2), "1e-39")
    for chi in enumerate_characters(5).primitive():
        assert close(gauss_factorization(chi, 0, ctx40), 0, "1e-39")


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 40), st.integers(1, 200))
def test_gauss_factorization_is_chi_tau(q, n):
    ctx = PrecisionContext(30)
    for chi in enumerate_characters(q).primitive():
        lhs = gauss_factorization(chi, n, ctx)
        rhs = chi(n, ctx) * gauss_sum(chi.conjugate(), ctx)
        assert abs(lhs - rhs) <= mpmath.mpf("1e-26")


def test_dirichlet_L_values(ctx40):
    mp = ctx40.mp
    assert close(dirichlet_L(2, enumerate_characters(1).characters[0], ctx40), mp.pi**2 / 6, "1e-38")
    chi4 = enumerate_characters(4).odd()[0]
    # Leibniz series summed with an independent accelerator
    with mpmath.workdps(50):
        leibniz = mpmath.nsum(lambda k: (-1) ** k / (2 * k + 1), [0, mpmath.inf])
    assert close(dirichlet_L(1, chi4, ctx40), leibniz, "1e-38")
    with pytest.raises(PoleError):
        dirichlet_L(1, enumerate_characters(5).principal(), ctx40)


@pytest.mark.parametrize("q", [5, 7, 8, 12])
def test_dirichlet_L_functional_equation(q):
    ctx = PrecisionContext(40)
    mp = ctx.mp
    s = mp.mpf("0.7")
    for chi in enumerate_characters(q).primitive():
        if chi.is_principal:
            continue
        kap = chi.kappa

        def completed(x, c):
            return (mp.mpf(q) / mp.pi) ** ((x + kap) / 2) * gamma((x + kap) / 2, ctx) * dirichlet_L(x, c, ctx)

        lhs = completed(s, chi)
        rhs = gauss_sum(chi, ctx) / (mp.mpc(0, 1) ** kap * mp.sqrt(q)) * completed(1 - s, chi.conjugate())
        assert abs(lhs - rhs) <= mp.mpf("1e-25") * abs(lhs)


@pytest.mark.parametrize("q", [3, 5, 8])
def test_dirichlet_L_against_mpmath(q):
    ctx = PrecisionContext(30)
    for chi in enumerate_characters(q).characters:
        table = [chi(n, ctx) for n in range(q)]
        with mpmath.workdps(40):
            ref = mpmath.dirichlet(mpmath.mpf("2.5"), table)
        assert abs(dirichlet_L("2.5", chi, ctx) - ref) <= mpmath.mpf("1e-26")


def test_trig_from_characters(ctx40):
    mp = ctx40.mp
    assert close(trig_from_characters(1, 1, 4, "sine", ctx40), 1, "1e-38")
    assert close(trig_from_characters(2, 1, 5, "cosine", ctx40), mp.cos(4 * mp.pi / 5), "1e-38")
    assert close(trig_from_characters(3, 2, 5, "sine", ctx40), mp.sin(2 * mp.pi / 5), "1e-38")
    with pytest.raises(GcdError):
        trig_from_characters(2, 1, 4, "sine", ctx40)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 30), st.integers(1, 100), st.integers(1, 100))
def test_trig_from_characters_property(q, d, h):
    if math.gcd(d, q) != 1 or math.gcd(h, q) != 1:
        return
    ctx = PrecisionContext(30)
    mp = ctx.mp
    ang = 2 * mp.pi * h * d / q
    assert abs(trig_from_characters(d, h, q, "sine", ctx) - mp.sin(ang)) <= mp.mpf("1e-26")
    assert abs(trig_from_characters(d, h, q, "cosine", ctx) - mp.cos(ang)) <= mp.mpf("1e-26")


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9, 12, 15])
def test_exact_orthogonality(q):
    # sum over one parity of chi(a) conj(chi(h)) is phi/2 * ([a=h] +- [a=-h]) exactly
    half = Fraction(euler_phi(q), 2)
    units = [a for a in range(1, q) if math.gcd(a, q) == 1]
    for a in units:
        for h in units:
            for parity, sign in (("even", 1), ("odd", -1)):
                expected = half * ((a % q == h % q) + sign * (a % q == (-h) % q))
                assert exact_character_orthogonality(q, a, h, parity) == expected
