"""Truncated series evaluators with tail control.

Two families are handled:

* Bessel-K weighted divisor series (the left sides), summed term by term
  until an exponential envelope bounds the remainder.
* Lattice sums  sum_{u in U} sum_{v in V} w_u w_v u^a v^b Phi(c u v)  over
  shifted arithmetic progressions (the right sides).  The inner sum is taken
  directly up to a cutoff and completed by an Euler-Maclaurin tail built from
  Bernoulli polynomials of the progression offsets; the outer sum is taken
  directly up to a cutoff and completed by expanding Phi in inverse powers,
  which turns the remainder into products of Hurwitz zeta values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arithmetic import DivisorWeight, WeightKind, weighted_divisor_sum
from .characters import DirichletCharacter
from .errors import ConvergenceError, HypothesisError
from .precision import EvaluationBudget, PrecisionContext, with_guard
from .special import (
    bernoulli_poly,
    bessel_K,
    digamma,
    gamma,
    hurwitz_zeta_general,
)

_DEFAULT = PrecisionContext()


@dataclass(frozen=True)
class TailEstimate:
    """A series value with an estimate of the omitted remainder."""

    value: object
    bound: object
    terms_used: int

    def summary(self) -> dict:
        return {"value": _dec(self.value), "bound": _dec(self.bound), "terms_used": self.terms_used}


def _dec(x, digits: int = 30) -> str:
    import mpmath

    if isinstance(x, mpmath.mpc) or hasattr(x, "imag") and not isinstance(x, (int, float)) and x.imag != 0:
        return f"{mpmath.nstr(x.real, digits)}{'+' if x.imag >= 0 else '-'}{mpmath.nstr(abs(x.imag), digits)}j"
    if hasattr(x, "real") and not isinstance(x, (int, float)):
        x = x.real
    return mpmath.nstr(x, digits)


# --------------------------------------------------------------------------
# Progressions


@dataclass(frozen=True)
class Progression:
    """Weighted union of shifted progressions {step*(m + offset): m >= 0}.

    ``finite`` lists explicit (value, weight) pairs instead, for sums over a
    finite set such as the single point {1}.
    """

    step: int = 1
    offsets: tuple = ((Fraction(1), 1),)
    finite: tuple | None = None

    @staticmethod
    def integers() -> "Progression":
        return Progression(1, ((Fraction(1), 1),))

    @staticmethod
    def character(chi: DirichletCharacter, ctx: PrecisionContext) -> "Progression":
        q = chi.modulus
        offs = []
        for h in range(1, q + 1):
            if chi.angle(h) is None:
                continue
            offs.append((Fraction(h, q), chi(h, ctx)))
        return Progression(q, tuple(offs))

    @staticmethod
    def shifted_pair(theta, sign: int) -> "Progression":
        """{m + theta} with weight 1 and {m + 1 - theta} with weight ``sign``."""
        return Progression(1, ((theta, 1), (_one_minus(theta), sign)))

    @staticmethod
    def single(theta, weight=1) -> "Progression":
        return Progression(1, ((theta, weight),))

    @staticmethod
    def point(value=1) -> "Progression":
        return Progression(1, (), finite=((value, 1),))

    def total_weight(self, mp):
        return sum((mp.mpmathify(w) for _, w in self.offsets), mp.mpf(0))

    def min_value(self, mp):
        if self.finite is not None:
            return min(_num(mp, v) for v, _ in self.finite)
        return self.step * min(_num(mp, a) for a, _ in self.offsets)


def _one_minus(theta):
    if isinstance(theta, (Fraction, int)):
        return 1 - Fraction(theta)
    return 1 - theta


def _num(mp, v):
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / v.denominator
    return mp.mpmathify(v)


# --------------------------------------------------------------------------
# Kernels Phi(w)


class RationalKernel:
    """Phi(w) = (1 + w)^(-rho)."""

    def __init__(self, rho):
        self.rho = rho
        self.radius = 1

    def value(self, mp, w, threshold=None):
        return (1 + w) ** (-self.rho)

    def laurent(self, mp, count):
        rho = mp.mpf(self.rho)
        coef = mp.mpf(1)
        out = []
        for l in range(count):
            out.append([(coef, rho + l)])
            coef = coef * (-rho - l) / (l + 1)
        return out

    def taylor(self, mp, M, C, b, P):
        """Coefficients of h -> (M+h)^b (1 + C(M+h))^(-rho) up to order P-1."""
        base = 1 + C * M
        g = [base ** (-self.rho)]
        ratio = C / base
        rho = mp.mpf(self.rho)
        for j in range(P - 1):
            g.append(g[-1] * (-rho - j) / (j + 1) * ratio)
        return _mul_series(_binomial_series(mp, M, b, P), g, P)


class CohenKernel:
    """Phi(w) = (w^s - X^s) / (w^2 - X^2), removable at w = X."""

    def __init__(self, s, X):
        self.s = s
        self.X = X
        self.radius = X

    def value(self, mp, w, threshold):
        s, X = self.s, self.X
        delta = w - X
        if abs(delta) < threshold * X:
            # (g(w)-g(X))/(w-X) by its Taylor series in delta, g(w) = w^s
            acc = mp.mpf(0)
            coef = mp.mpf(1)
            dpow = mp.mpf(1)
            eps = mp.eps
            for j in range(1, 200):
                coef = coef * (s - j + 1) / j  # binom(s, j)
                term = coef * X ** (s - j) * dpow
                acc += term
                if j >= 3 and abs(term) <= eps * abs(acc):
                    break
                dpow *= delta
            return acc / (w + X)
        return (w**s - X**s) / (w * w - X * X)

    def laurent(self, mp, count):
        s, X = self.s, self.X
        out = []
        for l in range(count):
            x2l = X ** (2 * l)
            out.append([(x2l, 2 + 2 * l - s), (-(X**s) * x2l, 2 + 2 * l)])
        return out

    def taylor(self, mp, M, C, b, P):
        s, X = self.s, self.X
        num1 = [C**s * t for t in _binomial_series(mp, M, b + s, P)]
        num2 = [X**s * t for t in _binomial_series(mp, M, b, P)]
        num = [p - q for p, q in zip(num1, num2)]
        # C^2 (M+h)^2 - X^2
        den = [C * C * M * M - X * X, 2 * C * C * M, C * C]
        return _div_series(num, den, P)


def _binomial_series(mp, M, e, P):
    out = [M**e]
    for j in range(P - 1):
        out.append(out[-1] * (e - j) / ((j + 1) * M))
    return out


def _mul_series(a, b, P):
    # trim exact zeros (polynomial factors) to keep the product cheap
    la = len(a)
    while la > 1 and a[la - 1] == 0:
        la -= 1
    out = []
    for n in range(P):
        acc = 0
        for i in range(min(n, la - 1) + 1):
            acc += a[i] * b[n - i]
        out.append(acc)
    return out


def _div_series(num, den, P):
    out = []
    for n in range(P):
        acc = num[n]
        for i in range(1, min(n, len(den) - 1) + 1):
            acc -= den[i] * out[n - i]
        out.append(acc / den[0])
    return out


# --------------------------------------------------------------------------
# Dirichlet-type series over a progression


def _progression_dirichlet(prog: Progression, s, ctx: PrecisionContext, start: int = 0):
    """sum over u in prog with m >= start of w_u u^(-s), by Hurwitz continuation."""
    mp = ctx.mp
    if prog.finite is not None:
        if start > 0:
            return mp.mpf(0)
        return sum((mp.mpmathify(w) * _num(mp, v) ** (-s) for v, w in prog.finite), mp.mpf(0))
    q = prog.step
    total_w = prog.total_weight(mp)
    if s <= 1 and abs(total_w) > mp.eps ** 0.5:
        raise ConvergenceError("divergent progression sum", {"s": str(s)})
    if s == 1:
        acc = mp.mpf(0)
        for a, w in prog.offsets:
            acc -= mp.mpmathify(w) * digamma(start + a if isinstance(a, Fraction) else start + _num(mp, a), ctx)
        return acc / q
    acc = mp.mpf(0)
    for a, w in prog.offsets:
        alpha = (start + a) if isinstance(a, Fraction) else start + _num(mp, a)
        acc += mp.mpmathify(w) * hurwitz_zeta_general(s, alpha, ctx)
    return acc * mp.mpf(q) ** (-s)


# --------------------------------------------------------------------------
# Lattice sums


@dataclass(frozen=True)
class LatticeSpec:
    outer: Progression
    a: object
    inner: Progression
    b: object
    kernel: object
    scale: object  # c in Phi(c u v)


def _bernoulli_weights(prog: Progression, P: int, ctx: PrecisionContext):
    mp = ctx.mp
    out = [mp.mpf(0)]
    for j in range(1, P + 1):
        acc = mp.mpf(0)
        for a, w in prog.offsets:
            acc += mp.mpmathify(w) * bernoulli_poly(j, a if isinstance(a, Fraction) else _num(mp, a), ctx)
        out.append(acc)
    return out


class _InnerSummer:
    """Evaluates T(u) = sum_{v in V} w_v v^b Phi(c u v) for one outer value u."""

    def __init__(self, spec: LatticeSpec, ctx: PrecisionContext, threshold):
        self.spec = spec
        self.ctx = ctx
        mp = ctx.mp
        self.mp = mp
        self.threshold = threshold
        self.b = mp.mpmathify(spec.b) if not isinstance(spec.b, Fraction) else _num(mp, spec.b)
        self.c = _num(mp, spec.scale)
        self.P = max(20, ctx.digits)
        self.m_em = int(0.7 * ctx.digits) + 5
        prog = spec.inner
        self.finite = prog.finite is not None
        if not self.finite:
            self.offsets = [(_num(mp, a), mp.mpmathify(w)) for a, w in prog.offsets]
            self.bw = _bernoulli_weights(prog, self.P, ctx)
            self.total_w = prog.total_weight(mp)
            self.abs_w = sum((abs(w) for _, w in self.offsets), mp.mpf(0))
            self.q = prog.step

    def __call__(self, u):
        mp = self.mp
        spec = self.spec
        kern = spec.kernel
        if self.finite:
            val = mp.mpf(0)
            for v, w in spec.inner.finite:
                vv = _num(mp, v)
                val += mp.mpmathify(w) * vv**self.b * kern.value(mp, self.c * u * vv, self.threshold)
            return val, mp.mpf(0), 0
        C = self.c * u * self.q
        R = kern.radius
        M = max(self.m_em, int(math.ceil(float(10 * R / C))) + 1)
        direct = mp.mpf(0)
        for a, w in self.offsets:
            part = mp.mpf(0)
            for m in range(M):
                t = m + a
                part += t**self.b * kern.value(mp, C * t, self.threshold)
            direct += w * part
        # Euler-Maclaurin completion
        coefs = kern.taylor(mp, mp.mpf(M), C, self.b, self.P)
        corr = mp.mpf(0)
        last = mp.mpf(0)
        scale = abs(direct) + abs(coefs[0])
        env = mp.mpf(1)
        for j in range(1, self.P + 1):
            term = coefs[j - 1] / j * self.bw[j]
            corr += term
            # |B_j(t)| <= 4 j!/(2 pi)^j on [0, 1]; several weights vanish identically
            env = env * j / (2 * mp.pi)
            last = 4 * env * self.abs_w * abs(coefs[j - 1]) / j
            if j > 4 and last <= mp.eps * scale:
                break
        tail = -corr
        if abs(self.total_w) > mp.eps:
            tail += self.total_w * self._integral(M, C)
        value = direct + tail
        return value * mp.mpf(self.q) ** self.b, last, M

    def _integral(self, M, C):
        """int_M^inf t^b Phi(C t) dt from the inverse-power expansion of Phi."""
        mp = self.mp
        kern = self.spec.kernel
        ratio = kern.radius / (C * M)
        count = int(math.ceil(self.ctx.digits / max(1e-3, -math.log10(float(ratio))))) + 3
        acc = mp.mpf(0)
        for group in kern.laurent(mp, count):
            for coef, sigma in group:
                e = self.b - sigma + 1
                acc += coef * C ** (-sigma) * mp.mpf(M) ** e / (-e)
        return acc


def lattice_sum(spec: LatticeSpec, ctx: PrecisionContext | None = None,
                budget: EvaluationBudget | None = None) -> TailEstimate:
    """sum_{u in U} sum_{v in V} w_u w_v u^a v^b Phi(c u v) with analytic tails."""
    ctx = ctx or _DEFAULT
    budget = budget or EvaluationBudget()
    w = with_guard(ctx, 10)
    mp = w.mp
    threshold = mp.mpf(budget.singularity_threshold)
    inner = _InnerSummer(spec, w, threshold)
    a = mp.mpmathify(spec.a) if not isinstance(spec.a, Fraction) else _num(mp, spec.a)
    c = _num(mp, spec.scale)
    outer = spec.outer
    kern = spec.kernel
    R = mp.mpf(kern.radius)
    total = mp.mpf(0)
    bound = mp.mpf(0)
    terms = 0
    if outer.finite is not None:
        for val, wt in outer.finite:
            u = _num(mp, val)
            t, last, M = inner(u)
            total += mp.mpmathify(wt) * u**a * t
            bound += abs(last)
            terms += M
        return TailEstimate(ctx.mp.mpmathify(total), ctx.mp.mpf(bound), terms)
    v_min = spec.inner.min_value(mp)
    q_u = outer.step
    a_min = min(_num(mp, x) for x, _ in outer.offsets)
    # outer cutoff so that the inverse-power expansion converges with ratio <= 1/30
    K = max(1, int(math.ceil(float(30 * R / (c * q_u * v_min) - a_min))) + 1)
    if K * len(outer.offsets) > budget.max_terms_outer:
        raise ConvergenceError("outer cutoff exceeds budget", {"K": K})
    for m in range(K):
        for off, wt in outer.offsets:
            u = q_u * (m + _num(mp, off))
            t, last, M = inner(u)
            total += mp.mpmathify(wt) * u**a * t
            bound += abs(last)
            terms += M
    # remainder u >= q_u (K + offset)
    ratio = R / (c * q_u * (K + a_min) * v_min)
    count = int(math.ceil(w.digits / max(1e-3, -math.log10(float(ratio))))) + 2
    tail = mp.mpf(0)
    last_group = mp.mpf(0)
    for group in kern.laurent(mp, count):
        gsum = mp.mpf(0)
        for coef, sigma in group:
            du = _progression_dirichlet(outer, sigma - a, w, start=K)
            dv = _progression_dirichlet(spec.inner, sigma - spec_b(spec, mp), w)
            gsum += coef * c ** (-sigma) * du * dv
        tail += gsum
        last_group = abs(gsum)
    total += tail
    bound += last_group * ratio / (1 - ratio)
    return TailEstimate(ctx.mp.mpmathify(total), ctx.mp.mpf(bound), terms + count)


def spec_b(spec: LatticeSpec, mp):
    return mp.mpmathify(spec.b) if not isinstance(spec.b, Fraction) else _num(mp, spec.b)


def lattice_box_sum(spec: LatticeSpec, m_outer: int, m_inner: int, ctx: PrecisionContext | None = None,
                    paired: bool = True):
    """Plain truncated sum over a box; ``paired=False`` sums each offset class separately.

    Used only as an oracle for the analytic-tail evaluator.
    """
    ctx = ctx or _DEFAULT
    mp = ctx.mp
    thr = mp.mpf("1e-6")
    a = mp.mpmathify(spec.a) if not isinstance(spec.a, Fraction) else _num(mp, spec.a)
    b = spec_b(spec, mp)
    c = _num(mp, spec.scale)

    def points(prog, count):
        if prog.finite is not None:
            return [(_num(mp, v), mp.mpmathify(w), 0) for v, w in prog.finite]
        return [(prog.step * (m + _num(mp, off)), mp.mpmathify(w), i)
                for m in range(count) for i, (off, w) in enumerate(prog.offsets)]

    if paired:
        total = mp.mpf(0)
        for u, wu, _ in points(spec.outer, m_outer):
            for v, wv, _ in points(spec.inner, m_inner):
                total += wu * wv * u**a * v**b * spec.kernel.value(mp, c * u * v, thr)
        return total
    classes: dict = {}
    for u, wu, iu in points(spec.outer, m_outer):
        for v, wv, iv in points(spec.inner, m_inner):
            classes[(iu, iv)] = classes.get((iu, iv), 0) + wu * wv * u**a * v**b * spec.kernel.value(mp, c * u * v, thr)
    return sum(classes.values(), mp.mpf(0))


# --------------------------------------------------------------------------
# Shape-level front ends


def _weight_progressions(weight: DivisorWeight | None, ctx: PrecisionContext):
    """Split a divisor weight into (outer progression over d, exponent, inner progression over n/d)."""
    if weight is None:
        return Progression.point(1), 0, Progression.integers()
    kind = weight.kind
    z = weight.z
    if kind is WeightKind.PLAIN_SIGMA:
        return Progression.integers(), z, Progression.integers()
    if kind is WeightKind.SIGMA_CHI:
        return Progression.character(weight.chi, ctx), z, Progression.integers()
    if kind is WeightKind.SIGMA_BAR_CHI:
        return Progression.integers(), z, Progression.character(weight.chi, ctx)
    if kind is WeightKind.SIGMA_CHI1_CHI2:
        return Progression.character(weight.chi1, ctx), z, Progression.character(weight.chi2, ctx)
    raise ValueError(f"weight kind {kind.value} has no rational right-side form")


def rational_rhs_series(weight: DivisorWeight | None, nu, k, c, budget: EvaluationBudget | None = None,
                        ctx: PrecisionContext | None = None) -> TailEstimate:
    """sum_n w(n) Gamma(nu+k+1) / (1 + c n)^(nu+k+1).

    ``weight=None`` means w == 1.  Divisor weights are split as
    sum_d d^z f(d) sum_r g(r) Phi(c d r) and evaluated as a lattice sum.
    """
    ctx = ctx or _DEFAULT
    mp = ctx.mp
    w = with_guard(ctx, 10)
    rho = w.mp.mpf(nu) + k + 1
    outer, z, inner = _weight_progressions(weight, w)
    if weight is not None and _all_zero(outer, inner):
        return TailEstimate(mp.mpf(0), mp.mpf(0), 0)
    spec = LatticeSpec(outer, z, inner, 0, RationalKernel(rho), c)
    est = lattice_sum(spec, ctx, budget)
    g = gamma(rho, w)
    return TailEstimate(mp.mpmathify(est.value * g), mp.mpf(abs(est.bound * g)), est.terms_used)


def _all_zero(*progs):
    return any(p.finite is None and all(w == 0 for _, w in p.offsets) for p in progs)


def theta_grid_series(outer: Progression, a, inner: Progression, b, nu, k, c,
                      budget: EvaluationBudget | None = None,
                      ctx: PrecisionContext | None = None) -> TailEstimate:
    """sum_u sum_v w_u w_v u^a v^b Gamma(nu+k+1) (1 + c u v)^-(nu+k+1) over theta-shifted grids.

    The theta and 1-theta members of a pair live in one progression, so they
    are combined inside each summand before any truncation.
    """
    ctx = ctx or _DEFAULT
    w = with_guard(ctx, 10)
    rho = w.mp.mpf(nu) + k + 1
    if _all_zero(outer, inner) or _cancelling_pair(outer, w) or _cancelling_pair(inner, w):
        return TailEstimate(ctx.mp.mpf(0), ctx.mp.mpf(0), 0)
    spec = LatticeSpec(outer, a, inner, b, RationalKernel(rho), c)
    est = lattice_sum(spec, ctx, budget)
    g = gamma(rho, w)
    return TailEstimate(ctx.mp.mpmathify(est.value * g), ctx.mp.mpf(abs(est.bound * g)), est.terms_used)


def _cancelling_pair(prog: Progression, ctx) -> bool:
    """A theta/1-theta difference at theta = 1/2 is identically zero."""
    if prog.finite is not None or len(prog.offsets) != 2:
        return False
    (a1, w1), (a2, w2) = prog.offsets
    mp = ctx.mp
    return _num(mp, a1) == _num(mp, a2) and mp.mpmathify(w1) + mp.mpmathify(w2) == 0


def cohen_tail_series(outer: Progression, a, inner: Progression, b, s, x,
                      budget: EvaluationBudget | None = None,
                      ctx: PrecisionContext | None = None, scale=1) -> TailEstimate:
    """sum_u sum_v w_u w_v u^a v^b ((uv)^s - x^s) / ((uv)^2 - x^2).

    Cells with uv within ``singularity_threshold * x`` of x use the
    removable-singularity expansion instead of the quotient.
    """
    ctx = ctx or _DEFAULT
    w = with_guard(ctx, 10)
    mp = w.mp
    if _all_zero(outer, inner) or _cancelling_pair(outer, w) or _cancelling_pair(inner, w):
        return TailEstimate(ctx.mp.mpf(0), ctx.mp.mpf(0), 0)
    spec = LatticeSpec(outer, a, inner, b, CohenKernel(mp.mpf(s), mp.mpf(x)), scale)
    return lattice_sum(spec, ctx, budget)


def bessel_lhs_series(weight: DivisorWeight, nu, a, x, budget: EvaluationBudget | None = None,
                      ctx: PrecisionContext | None = None, k=None, prefactor: bool = True,
                      weight_fn=None, envelope=None) -> TailEstimate:
    """(a^2 x/4)^(nu/2+k+1) sum_n w(n) n^(nu/2) K_nu(a sqrt(n x)).

    ``k`` defaults to the weight exponent.  ``prefactor=False`` returns the
    bare series.  ``weight_fn`` may replace the divisor weight by any
    callable n -> value (used for r6); ``envelope=(C, p)`` then supplies a
    bound |w(n)| <= C n^p for the tail estimate.  Terms are summed until an
    exponential envelope on the remainder falls below the tail target.
    """
    ctx = ctx or _DEFAULT
    budget = budget or EvaluationBudget()
    w = with_guard(ctx, 10)
    mp = w.mp
    nu = w.num(nu) if isinstance(nu, Fraction) else mp.mpf(nu)
    a = mp.mpf(a)
    x = mp.mpf(x)
    if weight is not None and weight.is_zero():
        return TailEstimate(ctx.mp.mpf(0), ctx.mp.mpf(0), 0)
    zexp = 0 if weight is None else weight.z
    zf = float(mp.mpf(zexp)) if not isinstance(zexp, Fraction) else float(zexp)
    kk = zf if k is None else k
    eps = mp.mpf(budget.tail_epsilon)
    ax = a * mp.sqrt(x)
    real = weight is None or weight.kind is WeightKind.PLAIN_SIGMA or weight.kind.value.startswith("trig")
    total = mp.mpf(0) if real else mp.mpc(0)
    pre = (a * a * x / 4) ** (nu / 2 + kk + 1) if prefactor else mp.mpf(1)
    # stop on the bound of the returned (prefactored) value
    eps = eps / abs(pre)
    n = 0
    bound = None
    # |w(n)| <= n^max(z,0) * (number of divisors) <= 2 n^(max(z,0)+1/2)
    wexp = max(zf, 0.0) + 0.5
    wconst = 2
    if envelope is not None:
        wconst, wexp = envelope
    while True:
        n += 1
        if n > budget.max_terms_outer:
            raise ConvergenceError("Bessel series exceeded term budget", {"n": n})
        if weight_fn is not None:
            wn = weight_fn(n)
        else:
            wn = weighted_divisor_sum(n, weight, w)
        y = ax * mp.sqrt(n)
        kv = bessel_K(nu, y, w)
        total += wn * mp.mpf(n) ** (nu / 2) * kv
        if n % 8 == 0 and y > nu + 2:
            # envelope E(t) = 2 t^p K-asymptotic; successive ratio r < 1 once y is large
            p = wexp + float(nu) / 2
            env = wconst * mp.mpf(n) ** p * abs(kv)
            r = mp.exp(-ax * (mp.sqrt(n + 1) - mp.sqrt(n))) * (mp.mpf(n + 1) / n) ** p
            if r < 1:
                bound = env * r / (1 - r)
                if bound <= eps:
                    break
    value = total * pre
    return TailEstimate(ctx.mp.mpmathify(value), ctx.mp.mpf(abs(bound * pre)), n)
