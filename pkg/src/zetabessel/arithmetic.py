"""Divisor-type weights, twisted divisor sums and sums of squares."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from .characters import DirichletCharacter
from .errors import SizeError
from .precision import PrecisionContext

_DEFAULT = PrecisionContext()
R6_BRUTE_LIMIT = 10_000


def divisors(n: int) -> list[int]:
    """All positive divisors of ``n`` in ascending order (trial division)."""
    if n < 1:
        raise ValueError("n must be positive")
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


class WeightKind(str, Enum):
    PLAIN_SIGMA = "plain_sigma"
    SIGMA_CHI = "sigma_chi"
    SIGMA_BAR_CHI = "sigma_bar_chi"
    SIGMA_CHI1_CHI2 = "sigma_chi1_chi2"
    TRIG_SIN_D = "trig_sin_d"
    TRIG_SIN_N_OVER_D = "trig_sin_n_over_d"
    TRIG_COS_D = "trig_cos_d"
    TRIG_COS_N_OVER_D = "trig_cos_n_over_d"
    TRIG_PRODUCT = "trig_product"


_TRIG_FN = {"sin": "sinpi", "cos": "cospi"}


@dataclass(frozen=True)
class DivisorWeight:
    """w(n) = sum_{d|n} d^z * f(d) * g(n/d) for one of the supported kinds.

    ``product_combo`` is used by ``trig_product`` only: a pair
    ((fn, theta-applied-to), (fn, psi-applied-to)) such as
    (("sin", "d"), ("cos", "n_over_d")).
    """

    kind: WeightKind
    z: object = 0
    chi: DirichletCharacter | None = None
    chi1: DirichletCharacter | None = None
    chi2: DirichletCharacter | None = None
    theta: object = None
    psi: object = None
    product_combo: tuple | None = None

    def __post_init__(self):
        kind = WeightKind(self.kind)
        object.__setattr__(self, "kind", kind)
        need = {
            WeightKind.SIGMA_CHI: ("chi",),
            WeightKind.SIGMA_BAR_CHI: ("chi",),
            WeightKind.SIGMA_CHI1_CHI2: ("chi1", "chi2"),
            WeightKind.TRIG_SIN_D: ("theta",),
            WeightKind.TRIG_SIN_N_OVER_D: ("theta",),
            WeightKind.TRIG_COS_D: ("theta",),
            WeightKind.TRIG_COS_N_OVER_D: ("theta",),
            WeightKind.TRIG_PRODUCT: ("theta", "psi", "product_combo"),
        }.get(kind, ())
        for name in need:
            if getattr(self, name) is None:
                raise ValueError(f"{kind.value} weight requires {name}")
        for name in ("theta", "psi"):
            v = getattr(self, name)
            if v is not None and not 0 < Fraction(str(v)) < 1:
                raise ValueError(f"{name} must lie in (0, 1)")

    def is_zero(self) -> bool:
        """True when every value is zero by symmetry (a sine at theta = 1/2)."""
        half = Fraction(1, 2)
        if self.kind in (WeightKind.TRIG_SIN_D, WeightKind.TRIG_SIN_N_OVER_D):
            return Fraction(str(self.theta)) == half
        if self.kind is WeightKind.TRIG_PRODUCT:
            (f1, _), (f2, _) = self.product_combo
            return (f1 == "sin" and Fraction(str(self.theta)) == half) or (
                f2 == "sin" and Fraction(str(self.psi)) == half)
        return False


def _trig(mp, fn: str, arg):
    # sin/cos of 2 pi * arg
    return getattr(mp, _TRIG_FN[fn])(2 * arg)


def weighted_divisor_sum(n: int, w: DivisorWeight, ctx: PrecisionContext | None = None):
    """Finite divisor sum defining w(n); complex for character kinds."""
    ctx = ctx or _DEFAULT
    mp = ctx.mp
    z = mp.mpf(w.z) if not isinstance(w.z, Fraction) else ctx.num(w.z)
    kind = w.kind
    th = None if w.theta is None else ctx.num(Fraction(str(w.theta))) if isinstance(w.theta, (str, Fraction)) else mp.mpf(w.theta)
    ps = None if w.psi is None else ctx.num(Fraction(str(w.psi))) if isinstance(w.psi, (str, Fraction)) else mp.mpf(w.psi)
    total = mp.mpc(0) if kind in (WeightKind.SIGMA_CHI, WeightKind.SIGMA_BAR_CHI, WeightKind.SIGMA_CHI1_CHI2) else mp.mpf(0)
    for d in divisors(n):
        e = n // d
        dz = mp.mpf(d) ** z
        if kind is WeightKind.PLAIN_SIGMA:
            total += dz
        elif kind is WeightKind.SIGMA_CHI:
            total += dz * w.chi(d, ctx)
        elif kind is WeightKind.SIGMA_BAR_CHI:
            total += dz * w.chi(e, ctx)
        elif kind is WeightKind.SIGMA_CHI1_CHI2:
            total += dz * w.chi1(d, ctx) * w.chi2(e, ctx)
        elif kind is WeightKind.TRIG_SIN_D:
            total += dz * _trig(mp, "sin", d * th)
        elif kind is WeightKind.TRIG_SIN_N_OVER_D:
            total += dz * _trig(mp, "sin", e * th)
        elif kind is WeightKind.TRIG_COS_D:
            total += dz * _trig(mp, "cos", d * th)
        elif kind is WeightKind.TRIG_COS_N_OVER_D:
            total += dz * _trig(mp, "cos", e * th)
        else:
            (f1, a1), (f2, a2) = w.product_combo
            u1 = d if a1 == "d" else e
            u2 = d if a2 == "d" else e
            total += dz * _trig(mp, f1, u1 * th) * _trig(mp, f2, u2 * ps)
    return total


def sigma_bar_reindexed(n: int, k: int, chi: DirichletCharacter):
    """sum_{d|n} (n/d)^k chi(d): the second ordering of sigma_bar_{k,chi}."""
    ctx = _DEFAULT
    total = ctx.mp.mpc(0)
    for d in divisors(n):
        total += ctx.mp.mpf(n // d) ** k * chi(d, ctx)
    return total


def sigma_int(n: int, k: int) -> int:
    """Exact sigma_k(n) for integer k >= 0."""
    return sum(d**k for d in divisors(n))


# --------------------------------------------------------------------------
# sums of squares


def r2(n: int) -> int:
    """Number of (x1, x2) in Z^2 with x1^2 + x2^2 = n."""
    if n < 0:
        return 0
    count = 0
    x = 0
    while x * x <= n:
        rest = n - x * x
        y = _isqrt_exact(rest)
        if y is not None:
            count += (2 if x else 1) * (2 if y else 1)
        x += 1
    return count


def _isqrt_exact(m: int):
    from math import isqrt

    r = isqrt(m)
    return r if r * r == m else None


@lru_cache(maxsize=None)
def _r2_table(limit: int) -> tuple[int, ...]:
    return tuple(r2(m) for m in range(limit + 1))


@lru_cache(maxsize=None)
def _r4_table(limit: int) -> tuple[int, ...]:
    t2 = _r2_table(limit)
    return tuple(sum(t2[j] * t2[m - j] for j in range(m + 1)) for m in range(limit + 1))


def r6_bruteforce(n: int) -> int:
    """Count points of Z^6 on the sphere of squared radius n.

    Enumerates two coordinates explicitly and counts the remaining four with a
    memoised r4 table built by convolving r2 with itself.
    """
    if n < 0:
        return 0
    if n > R6_BRUTE_LIMIT:
        raise SizeError(f"r6_bruteforce is limited to n <= {R6_BRUTE_LIMIT}")
    t4 = _r4_table(1 << max(9, n.bit_length()))
    count = 0
    x = 0
    while x * x <= n:
        y = 0
        while x * x + y * y <= n:
            mult = (2 if x else 1) * (2 if y else 1)
            count += mult * t4[n - x * x - y * y]
            y += 1
        x += 1
    return count


def _chi4(m: int) -> int:
    # (-1)^((m-1)/2) on odd m
    return 0 if m % 2 == 0 else (1 if m % 4 == 1 else -1)


def r6_formula(n: int) -> int:
    """r6(n) from the divisor formula with the non-principal character mod 4."""
    if n < 1:
        raise ValueError("n must be positive")
    first = 0
    second = 0
    for d in divisors(n):
        first += _chi4(n // d) * d * d
        second += _chi4(d) * d * d
    return 16 * first - 4 * second
