"""Dirichlet characters with exact angle tables, Gauss sums and L-values.

A character value chi(n) = exp(2 pi i * angle(n)) is stored as the exact
rational ``angle(n)`` in [0, 1); non-units map to ``None``.  Complex numbers
are produced only on evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .errors import GcdError, PoleError
from .precision import PrecisionContext, with_guard
from .special import digamma, hurwitz_zeta

_DEFAULT = PrecisionContext()
MAX_MODULUS = 1000


def _factorize(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n: int) -> int:
    result = n
    for p, _ in _factorize(n):
        result -= result // p
    return result


def _cyclic_factors(q: int) -> list[tuple[int, int]]:
    """Generators and orders of the cyclic factors of (Z/qZ)^x, lifted by CRT."""
    factors = []
    for p, e in _factorize(q):
        pe = p**e
        rest = q // pe
        local: list[tuple[int, int]] = []
        if p == 2:
            if e == 2:
                local.append((3, 2))
            elif e >= 3:
                local.append((pe - 1, 2))
                local.append((5, 2 ** (e - 2)))
        else:
            order = pe - pe // p
            g = next(g for g in range(2, pe) if _is_primitive_root(g, p, pe, order))
            local.append((g, order))
        for g, order in local:
            # element that is g mod p^e and 1 mod the rest
            lifted = g if rest == 1 else _crt(g, pe, 1, rest)
            factors.append((lifted, order, pe))
    return [(g, o, m) for g, o, m in factors]


def _is_primitive_root(g: int, p: int, pe: int, order: int) -> bool:
    if math.gcd(g, p) != 1:
        return False
    for r, _ in _factorize(order):
        if pow(g, order // r, pe) == 1:
            return False
    return True


def _crt(a: int, m: int, b: int, n: int) -> int:
    inv = pow(m, -1, n)
    return (a + m * ((b - a) * inv % n)) % (m * n)


@dataclass(frozen=True)
class DirichletCharacter:
    """One character mod q with an exact angle table indexed by residue."""

    modulus: int
    angles: tuple  # angles[n % q] is a Fraction in [0,1) or None
    label: tuple  # exponents on the cyclic factors

    @property
    def q(self) -> int:
        return self.modulus

    def angle(self, n: int):
        return self.angles[n % self.modulus]

    def __call__(self, n: int, ctx: PrecisionContext | None = None):
        ctx = ctx or _DEFAULT
        a = self.angle(n)
        if a is None:
            return ctx.mp.mpc(0)
        return _root_of_unity(a, ctx)

    @property
    def is_principal(self) -> bool:
        return all(a is None or a == 0 for a in self.angles)

    @property
    def parity(self) -> str:
        a = self.angle(-1)
        return "even" if a == 0 else "odd"

    @property
    def kappa(self) -> int:
        return 0 if self.parity == "even" else 1

    @property
    def order(self) -> int:
        return math.lcm(*[a.denominator for a in self.angles if a is not None]) if self.modulus > 0 else 1

    @property
    def conductor(self) -> int:
        return _conductor(self)

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def conjugate(self) -> "DirichletCharacter":
        angles = tuple(None if a is None else (-a) % 1 for a in self.angles)
        for c in enumerate_characters(self.modulus).characters:
            if c.angles == angles:
                return c
        raise AssertionError("conjugate character missing from its group")

    def real_value(self, n: int) -> int:
        """chi(n) as an integer when the value is real (0, 1 or -1)."""
        a = self.angle(n)
        if a is None:
            return 0
        if a == 0:
            return 1
        if a == Fraction(1, 2):
            return -1
        raise ValueError("character value is not real")

    def describe(self) -> str:
        return f"chi mod {self.modulus} {list(self.label)}"


def _root_of_unity(angle: Fraction, ctx: PrecisionContext):
    mp = ctx.mp
    # exact values at quarter turns avoid spurious rounding in real parts
    quarter = {Fraction(0): (1, 0), Fraction(1, 4): (0, 1), Fraction(1, 2): (-1, 0), Fraction(3, 4): (0, -1)}
    if angle in quarter:
        re, im = quarter[angle]
        return mp.mpc(re, im)
    x = mp.mpf(2 * angle.numerator) / angle.denominator
    return mp.mpc(mp.cospi(x), mp.sinpi(x))


def _conductor(chi: DirichletCharacter) -> int:
    q = chi.modulus
    for d in sorted(_divisors(q)):
        if d == q:
            return q
        # induced from modulus d iff trivial on units congruent to 1 mod d
        if all(chi.angle(n) == 0 for n in range(1, q, d) if math.gcd(n, q) == 1):
            return d
    return q


def _divisors(n: int) -> list[int]:
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


@dataclass(frozen=True)
class CharacterGroup:
    modulus: int
    characters: tuple
    phi: int

    def odd(self) -> list[DirichletCharacter]:
        return [c for c in self.characters if c.parity == "odd"]

    def even(self) -> list[DirichletCharacter]:
        return [c for c in self.characters if c.parity == "even"]

    def primitive(self) -> list[DirichletCharacter]:
        return [c for c in self.characters if c.is_primitive]

    def principal(self) -> DirichletCharacter:
        return next(c for c in self.characters if c.is_principal)

    def find(self, label) -> DirichletCharacter:
        label = tuple(label)
        for c in self.characters:
            if c.label == label:
                return c
        raise KeyError(f"no character with label {label} mod {self.modulus}")


@lru_cache(maxsize=256)
def enumerate_characters(q: int) -> CharacterGroup:
    """All phi(q) characters mod q, built from generators of the unit group."""
    if q < 1:
        raise ValueError("q must be positive")
    if q > MAX_MODULUS:
        raise ValueError(f"q must be at most {MAX_MODULUS}")
    factors = _cyclic_factors(q)
    # discrete logs of every unit with respect to the factor generators
    logs: dict[int, tuple[int, ...]] = {}
    orders = [o for _, o, _ in factors]
    gens = [g for g, _, _ in factors]
    for exps in product(*[range(o) for o in orders]):
        n = 1
        for g, e in zip(gens, exps):
            n = n * pow(g, e, q) % q
        logs[n % q if q > 1 else 0] = exps
    chars = []
    for label in product(*[range(o) for o in orders]):
        angles = []
        for n in range(q):
            if q == 1:
                angles.append(Fraction(0))
            elif n in logs and math.gcd(n, q) == 1:
                ang = sum((Fraction(a * e, o) for a, e, o in zip(label, logs[n], orders)), Fraction(0))
                angles.append(ang % 1)
            else:
                angles.append(None)
        chars.append(DirichletCharacter(q, tuple(angles), tuple(label)))
    return CharacterGroup(q, tuple(chars), euler_phi(q))


# --------------------------------------------------------------------------
# Gauss sums and L-functions


def gauss_sum(chi: DirichletCharacter, ctx: PrecisionContext | None = None):
    """tau(chi) = sum_{h=1}^{q} chi(h) e^{2 pi i h/q}."""
    ctx = ctx or _DEFAULT
    q = chi.modulus
    total = ctx.mp.mpc(0)
    for h in range(1, q + 1):
        a = chi.angle(h)
        if a is None:
            continue
        total += _root_of_unity((a + Fraction(h, q)) % 1, ctx)
    return total


def gauss_factorization(chi: DirichletCharacter, n: int, ctx: PrecisionContext | None = None):
    """sum_{h=1}^{q-1} conj(chi)(h) e^{2 pi i n h/q}."""
    ctx = ctx or _DEFAULT
    q = chi.modulus
    if q == 1:
        return ctx.mp.mpc(1)
    total = ctx.mp.mpc(0)
    for h in range(1, q):
        a = chi.angle(h)
        if a is None:
            continue
        total += _root_of_unity((-a + Fraction(n * h, q)) % 1, ctx)
    return total


def dirichlet_L(s, chi: DirichletCharacter, ctx: PrecisionContext | None = None):
    """L(s, chi) from Hurwitz zeta values at r/q; s=1 via digamma."""
    ctx = ctx or _DEFAULT
    w = with_guard(ctx, 5)
    mp = w.mp
    q = chi.modulus
    s_val = mp.mpf(s)
    if s_val == 1:
        if chi.is_principal:
            raise PoleError("L(s, principal) has a pole at s=1")
        total = mp.mpc(0)
        for r in range(1, q + 1):
            if chi.angle(r) is None:
                continue
            total += chi(r, w) * digamma(Fraction(r, q), w)
        return ctx.mp.mpc(-total / q)
    total = mp.mpc(0)
    for r in range(1, q + 1):
        if chi.angle(r) is None:
            continue
        total += chi(r, w) * hurwitz_zeta(s_val, Fraction(r, q), w)
    return ctx.mp.mpc(total * mp.mpf(q) ** (-s_val))


def trig_from_characters(d: int, h: int, q: int, kind: str, ctx: PrecisionContext | None = None):
    """sin or cos of 2 pi h d / q rebuilt from odd or even characters and Gauss sums."""
    ctx = ctx or _DEFAULT
    if math.gcd(d, q) != 1 or math.gcd(h, q) != 1:
        raise GcdError("trig_from_characters requires gcd(d,q)=gcd(h,q)=1")
    group = enumerate_characters(q)
    mp = ctx.mp
    if kind == "sine":
        chars = group.odd()
        scale = 1 / (mp.mpc(0, 1) * group.phi)
    elif kind == "cosine":
        chars = group.even()
        scale = mp.mpf(1) / group.phi
    else:
        raise ValueError("kind must be 'sine' or 'cosine'")
    total = mp.mpc(0)
    for chi in chars:
        total += chi(d, ctx) * gauss_sum(chi.conjugate(), ctx) * chi(h, ctx)
    return mp.re(total * scale)


# --------------------------------------------------------------------------
# Exact sums of roots of unity


def _cyclotomic(n: int) -> tuple[int, ...]:
    """Integer coefficients (low degree first) of the n-th cyclotomic polynomial."""
    return _cyclotomic_cached(n)


@lru_cache(maxsize=None)
def _cyclotomic_cached(n: int) -> tuple[int, ...]:
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in _divisors(n):
        if d < n:
            poly = _poly_divexact(poly, list(_cyclotomic_cached(d)))
    return tuple(poly)


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, dc in enumerate(den):
            num[i + j] -= c * dc
    return out


def _poly_mod(num: list[int], mod: tuple[int, ...]) -> list[int]:
    num = num[:]
    deg = len(mod) - 1
    for i in range(len(num) - 1, deg - 1, -1):
        c = num[i]
        if c:
            for j, mc in enumerate(mod):
                num[i - deg + j] -= c * mc
    out = num[:deg] if deg > 0 else []
    while out and out[-1] == 0:
        out.pop()
    return out


def exact_root_sum(angles_with_coeffs) -> tuple[int, list[int]]:
    """Reduce sum c_j exp(2 pi i a_j) to canonical form in Z[zeta_N].

    Returns ``(N, coefficients)`` where the coefficient list is the unique
    representative of degree below phi(N).  A constant integer value c
    reduces to ``[c]`` (or ``[]`` for zero).
    """
    items = [(Fraction(a) % 1, int(c)) for a, c in angles_with_coeffs]
    n = math.lcm(1, *[a.denominator for a, _ in items])
    vec = [0] * n
    for a, c in items:
        vec[(a.numerator * (n // a.denominator)) % n] += c
    return n, _poly_mod(vec, _cyclotomic(n))


def exact_character_orthogonality(q: int, a: int, h: int, parity: str) -> Fraction:
    """sum over characters of the given parity of chi(a) conj(chi)(h), exactly.

    Raises ``ValueError`` if the sum is not a rational integer, which would
    contradict orthogonality.
    """
    group = enumerate_characters(q)
    chars = group.odd() if parity == "odd" else group.even()
    items = []
    for chi in chars:
        x, y = chi.angle(a), chi.angle(h)
        if x is None or y is None:
            continue
        items.append((x - y, 1))
    if not items:
        return Fraction(0)
    _, coeffs = exact_root_sum(items)
    if len(coeffs) > 1:
        raise ValueError("orthogonality sum is not rational")
    return Fraction(coeffs[0] if coeffs else 0)
