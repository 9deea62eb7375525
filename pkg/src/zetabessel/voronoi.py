"""Voronoi-type summation formulas checked by quadrature.

The left side is a finite weighted sum over the integers strictly inside
(alpha, beta).  The right side is a main-term integral plus a series of
Bessel-kernel integrals indexed by a hyperbolic lattice of points lambda.
That series converges only conditionally, so it is summed with Riesz means
(1 - lambda/X)^kappa in increasing lambda and then Richardson-extrapolated
in X.  Each per-point integral comes either from adaptive Gauss-Legendre
quadrature or, for large lambda, from an exact boundary expansion obtained
by integrating by parts against y^(1-nu) C_nu(y) = -d/dy[y^(1-nu) C_(nu-1)(y)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arithmetic import DivisorWeight, WeightKind, weighted_divisor_sum
from .characters import dirichlet_L, gauss_sum
from .errors import ConvergenceError, HypothesisError, QuadratureError
from .precision import EvaluationBudget, PrecisionContext, with_guard
from .series import TailEstimate
from .special import bessel_JYK, gamma, hurwitz_zeta, riemann_zeta

# --------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class TestFunction:
    """An analytic test function chosen from a closed set of tags.

    ``exp_decay``: exp(-rate t); ``polynomial``: sum c_i t^i (ascending);
    ``gaussian``: exp(-(t - center)^2 / (2 width^2)).
    """

    tag: str
    params: tuple

    __test__ = False  # keep pytest from collecting this class

    @staticmethod
    def parse(spec) -> "TestFunction":
        if isinstance(spec, TestFunction):
            return spec
        if spec is None:
            return TestFunction("exp_decay", (Fraction(1),))
        text = str(spec).strip()
        tag, _, rest = text.partition(":")
        tag = tag.strip()
        try:
            vals = tuple(Fraction(v.strip()) for v in rest.split(",") if v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise HypothesisError(f"bad test function parameters: {text!r}") from exc
        if tag == "exp_decay":
            return TestFunction(tag, vals or (Fraction(1),))
        if tag == "polynomial":
            if not vals:
                raise HypothesisError("polynomial needs at least one coefficient")
            return TestFunction(tag, vals)
        if tag == "gaussian":
            if len(vals) != 2 or vals[1] <= 0:
                raise HypothesisError("gaussian needs center,width with width > 0")
            return TestFunction(tag, vals)
        raise HypothesisError(f"unknown test function {tag!r} (use exp_decay, polynomial or gaussian)")

    def __str__(self):
        return f"{self.tag}:" + ",".join(str(v) for v in self.params)

    def derivatives(self, t, order: int, mp) -> list:
        """[f(t), f'(t), ..., f^(order)(t)]."""
        t = mp.mpf(t)
        if self.tag == "exp_decay":
            r = mp.mpf(self.params[0].numerator) / self.params[0].denominator
            e = mp.exp(-r * t)
            return [(-r) ** j * e for j in range(order + 1)]
        if self.tag == "polynomial":
            coefs = [mp.mpf(c.numerator) / c.denominator for c in self.params]
            out = []
            for _ in range(order + 1):
                out.append(mp.polyval(coefs[::-1], t) if coefs else mp.mpf(0))
                coefs = [i * c for i, c in enumerate(coefs)][1:]
            return out
        center = mp.mpf(self.params[0].numerator) / self.params[0].denominator
        width = mp.mpf(self.params[1].numerator) / self.params[1].denominator
        h = 1 / (width * mp.sqrt(2))
        u = (t - center) * h
        e = mp.exp(-u * u)
        herm = [mp.mpf(1), 2 * u]
        while len(herm) < order + 1:
            j = len(herm) - 1
            herm.append(2 * u * herm[j] - 2 * j * herm[j - 1])
        return [(-h) ** j * herm[j] * e for j in range(order + 1)]

    def value(self, t, mp):
        return self.derivatives(t, 0, mp)[0]


def _power_derivatives(t, p, order, mp):
    """Derivatives of t^(-p)."""
    out = []
    coef = mp.mpf(1)
    for k in range(order + 1):
        out.append(coef * t ** (-p - k))
        coef *= -p - k
    return out


def modified_derivatives(f: TestFunction, t, p, order, mp) -> list:
    """Derivatives of g(t) = f(t) t^(-p) by the Leibniz rule."""
    fd = f.derivatives(t, order, mp)
    if p == 0:
        return fd
    pd = _power_derivatives(mp.mpf(t), p, order, mp)
    out = []
    for n in range(order + 1):
        acc = mp.mpf(0)
        for k in range(n + 1):
            acc += mp.binomial(n, k) * fd[k] * pd[n - k]
        out.append(acc)
    return out


# --------------------------------------------------------------------------
# quadrature


@lru_cache(maxsize=32)
def _legendre_nodes(n: int, dps: int):
    import mpmath

    ctx = mpmath.MPContext()
    ctx.dps = dps + 10
    mp = ctx
    nodes = []
    for i in range(1, n // 2 + 1):
        x = mp.cos(mp.pi * (i - mp.mpf(1) / 4) / (n + mp.mpf(1) / 2))
        for _ in range(100):
            p0, p1 = mp.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x -= dx
            if abs(dx) < mp.mpf(10) ** (-(dps + 8)):
                break
        p0, p1 = mp.mpf(1), x
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = n * (x * p1 - p0) / (x * x - 1)
        w = 2 / ((1 - x * x) * dp * dp)
        nodes.append((str(x), str(w)))
        nodes.append((str(-x), str(w)))
    if n % 2 == 1:
        p0, p1 = mp.mpf(1), mp.mpf(0)
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * 0 * p1 - (k - 1) * p0) / k
        # derivative of P_n at 0 via n P_{n-1}(0)
        dp = n * p0
        nodes.append(("0", str(2 / (dp * dp))))
    return tuple(nodes)


def gauss_legendre(g, a, b, n: int, mp):
    """Fixed n-point Gauss-Legendre rule on [a, b]."""
    half = (b - a) / 2
    mid = (b + a) / 2
    total = mp.mpf(0)
    for x, w in _legendre_nodes(n, mp.dps):
        total += mp.mpf(w) * g(mid + half * mp.mpf(x))
    return total * half


def quadrature(g, alpha, beta, tol, ctx: PrecisionContext | None = None, order: int = 16,
               max_depth: int = 40):
    """Adaptive Gauss-Legendre integral of g over [alpha, beta].

    Each panel is compared with the sum over its two halves; panels are
    split until that difference is below their share of ``tol``.
    """
    ctx = ctx or PrecisionContext(30)
    mp = ctx.mp
    a, b = mp.mpf(alpha), mp.mpf(beta)
    if not a < b:
        raise QuadratureError("quadrature needs alpha < beta")
    tol = mp.mpf(tol)
    length = b - a
    total = mp.mpf(0)
    whole = gauss_legendre(g, a, b, order, mp)
    stack = [(a, b, whole, 0)]
    while stack:
        lo, hi, est, depth = stack.pop()
        mid = (lo + hi) / 2
        left = gauss_legendre(g, lo, mid, order, mp)
        right = gauss_legendre(g, mid, hi, order, mp)
        if abs(left + right - est) <= tol * (hi - lo) / length:
            total += left + right
            continue
        if depth >= max_depth:
            raise QuadratureError("quadrature subdivision limit reached",
                                  {"interval": (str(lo), str(hi))})
        stack.append((mid, hi, right, depth + 1))
        stack.append((lo, mid, left, depth + 1))
    return total


# --------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class VoronoiKernel:
    """kc (2/pi) K_mu + yc Y_mu + jc J_mu with fixed trigonometric coefficients."""

    kc: object
    yc: object
    jc: object

    @staticmethod
    def Z(nu, mp):
        s, c = mp.sinpi(nu / 2), mp.cospi(nu / 2)
        return VoronoiKernel(s, s, -c)

    @staticmethod
    def W(nu, mp):
        s, c = mp.sinpi(nu / 2), mp.cospi(nu / 2)
        return VoronoiKernel(c, -c, -s)

    @staticmethod
    def Z_plus(nu, mp):
        """(2/pi K - Y) sin + J cos, the sign variant attached to n/d weights."""
        s, c = mp.sinpi(nu / 2), mp.cospi(nu / 2)
        return VoronoiKernel(s, -s, c)

    @staticmethod
    def W_plus(nu, mp):
        """(2/pi K + Y) cos + J sin."""
        s, c = mp.sinpi(nu / 2), mp.cospi(nu / 2)
        return VoronoiKernel(c, c, s)

    def combine(self, j, y, k, mp):
        return self.kc * 2 / mp.pi * k + self.yc * y + self.jc * j

    def value(self, order, y, ctx: PrecisionContext):
        j, yy, k = bessel_JYK(order, y, ctx)
        return self.combine(j, yy, k, ctx.mp)

    def shifted(self, order, y, count, ctx: PrecisionContext) -> list:
        """Kernel at orders order-1, order-2, ..., order-count (downward recurrence)."""
        mp = ctx.mp
        j0, y0, k0 = bessel_JYK(order, y, ctx)
        j1, y1, k1 = bessel_JYK(order - 1, y, ctx)
        out = [self.combine(j1, y1, k1, mp)]
        mu = order - 1
        for _ in range(count - 1):
            # C_(mu-1) = (2 mu / y) C_mu - C_(mu+1);  K_(mu-1) = K_(mu+1) - (2 mu / y) K_mu
            j0, j1 = j1, 2 * mu / y * j1 - j0
            y0, y1 = y1, 2 * mu / y * y1 - y0
            k0, k1 = k1, k0 - 2 * mu / y * k1
            mu -= 1
            out.append(self.combine(j1, y1, k1, mp))
        return out


def kernel_integral(f: TestFunction, p, lam, nu, kernel: VoronoiKernel, alpha, beta,
                    ctx: PrecisionContext, tol, max_terms: int = 40):
    """int_alpha^beta f(t) t^(-p-nu/2) kernel_nu(4 pi sqrt(lam t)) dt.

    Large ``lam``: boundary expansion; each step gains a factor
    g^(j+1)/(8 pi^2 lam g^(j)) and lowers the Bessel order by one.  The
    expansion is accepted when its terms fall below ``tol`` before they
    start growing; otherwise the integral is done by quadrature.
    Returns (value, method).
    """
    mp = ctx.mp
    lam = mp.mpf(lam)
    a, b = mp.mpf(alpha), mp.mpf(beta)
    four_pi_rt = 4 * mp.pi * mp.sqrt(lam)
    scale = four_pi_rt ** nu / (8 * mp.pi ** 2 * lam)
    ya, yb = four_pi_rt * mp.sqrt(a), four_pi_rt * mp.sqrt(b)
    if ya > 6:
        count = min(max_terms, int(ya / 2))
        if count >= 3:
            ga = modified_derivatives(f, a, p, count, mp)
            gb = modified_derivatives(f, b, p, count, mp)
            ka = kernel.shifted(nu, ya, count + 1, ctx)
            kb = kernel.shifted(nu, yb, count + 1, ctx)
            step = 8 * mp.pi ** 2 * lam
            total = mp.mpf(0)
            prev = None
            for j in range(count + 1):
                denom = step ** j
                term = -(gb[j] / denom * yb ** (1 - nu + j) * kb[j]
                         - ga[j] / denom * ya ** (1 - nu + j) * ka[j])
                total += term
                size = abs(term) * scale
                if j >= 2 and size <= tol:
                    return total * scale, "boundary"
                if prev is not None and j >= 3 and size > prev:
                    break
                prev = size
    integrand = lambda t: (modified_derivatives(f, t, p, 0, mp)[0] * t ** (-nu / 2)
                           * kernel.value(nu, four_pi_rt * mp.sqrt(t), ctx))
    return quadrature(integrand, a, b, tol, ctx), "quadrature"


# --------------------------------------------------------------------------
# lattices


def product_lattice(X, outer, inner, nu, exponent, mp) -> dict:
    """Points lam = (n + a)(m + b) <= X with weight s_a s_b ((m+b)/(n+a))^(exponent nu/2).

    ``outer`` and ``inner`` are lists of (offset, sign) with offsets in (0, 1].
    """
    pts: dict = {}
    X = Fraction(X)
    bmin = min(b for b, _ in inner)
    for a, sa in outer:
        n = 0
        while (n + a) * bmin <= X:
            u = n + a
            for b, sb in inner:
                m = 0
                while u * (m + b) <= X:
                    v = m + b
                    lam = u * v
                    w = sa * sb * (mp.mpf(v.numerator) / v.denominator
                                   / (mp.mpf(u.numerator) / u.denominator)) ** (exponent * nu / 2)
                    pts[lam] = pts.get(lam, 0) + w
                    m += 1
            n += 1
    return pts


def divisor_lattice(X, q, weight: DivisorWeight, nu, ctx) -> dict:
    """Points lam = n/q <= X with weight w(n) n^(nu/2)."""
    mp = ctx.mp
    pts = {}
    for n in range(1, int(Fraction(X) * q) + 1):
        w = weighted_divisor_sum(n, weight, ctx)
        if w != 0:
            pts[Fraction(n, q)] = w * mp.mpf(n) ** (nu / 2)
    return pts


def riesz_sum(groups, f, p, nu, alpha, beta, X, kappa, ctx, tol):
    """Riesz means of order kappa at X, X/2 and X/4, extrapolated in X.

    ``groups`` is a list of (kernel, {lam: weight}).  The means approach
    their limit like 1/X, so 2 S(X) - S(X/2) removes the leading error.
    The bound is the larger of |S(X) - S(X/2)| and the change between the
    extrapolations from (X, X/2) and (X/2, X/4).  Returns
    (extrapolated, bound, number of points).
    """
    mp = ctx.mp
    cuts = [ctx.num(Fraction(X)) / 2 ** i for i in range(3)]
    means = [mp.mpf(0)] * 3
    count = 0
    for kernel, pts in groups:
        for lam in sorted(pts):
            lv = mp.mpf(lam.numerator) / lam.denominator
            if lv > cuts[0]:
                continue
            val, _ = kernel_integral(f, p, lv, nu, kernel, alpha, beta, ctx, tol)
            term = pts[lam] * val
            for i, cut in enumerate(cuts):
                if lv <= cut:
                    means[i] += term * (1 - lv / cut) ** kappa
            count += 1
    s0, s1, s2 = means
    extrap = 2 * s0 - s1
    bound = max(abs(s0 - s1), abs(extrap - (2 * s1 - s2)))
    return extrap, bound, count


# --------------------------------------------------------------------------
# identity plumbing (shared with the registry in ``identities``)


def _params_common(P):
    nu = P.frac("nu")
    alpha, beta = P.frac("alpha"), P.frac("beta")
    return nu, alpha, beta


def _check_interval(P, nu_lo=Fraction(0), nu_lo_open=True):
    nu, alpha, beta = _params_common(P)
    if not (nu > nu_lo if nu_lo_open else nu >= nu_lo) or not nu < Fraction(1, 2):
        raise HypothesisError(f"nu must lie in ({nu_lo}, 1/2)")
    if not 0 < alpha < beta:
        raise HypothesisError("need 0 < alpha < beta")
    if alpha.denominator == 1 or beta.denominator == 1:
        raise HypothesisError("alpha and beta must not be integers")
    if nu == 0:
        raise HypothesisError("nu must be non-zero")
    TestFunction.parse(P.raw.get("f"))


def _lhs_sum(P, weight: DivisorWeight, divide_by_j=False, factor=1):
    ctx = P.ctx
    mp = P.mp
    f = TestFunction.parse(P.raw.get("f"))
    _, alpha, beta = _params_common(P)
    lo = math.floor(alpha) + 1
    hi = math.ceil(beta) - 1
    total = mp.mpf(0)
    for j in range(lo, hi + 1):
        term = weighted_divisor_sum(j, weight, ctx) * f.value(j, mp)
        total += term / j if divide_by_j else term
    return TailEstimate(total * factor, mp.mpf(0), max(0, hi - lo + 1))


def _main_integral(P, power):
    """int_alpha^beta f(t) t^(-power) dt at full precision."""
    ctx = P.ctx
    mp = ctx.mp
    f = TestFunction.parse(P.raw.get("f"))
    _, alpha, beta = _params_common(P)
    a, b = ctx.num(alpha), ctx.num(beta)
    if power == 0:
        g = lambda t: f.value(t, mp)
    else:
        g = lambda t: f.value(t, mp) * t ** (-power)
    return quadrature(g, a, b, mp.eps * 100, ctx, order=24)


def _tail(P, groups_fn, p, budget: EvaluationBudget, pref):
    """pref * sum over lattice points of weight * per-point integral."""
    ctx = P.ctx
    mp = ctx.mp
    digits = int(budget.options.get("voronoi_digits", 20))
    work = PrecisionContext(min(ctx.digits, digits), guard_digits=5)
    wm = work.mp
    nu = work.num(P.frac("nu"))
    _, alpha, beta = _params_common(P)
    X = Fraction(str(budget.options.get("voronoi_cutoff", P.raw.get("cutoff") or 1000)))
    kappa = int(budget.options.get("riesz_order", 2))
    f = TestFunction.parse(P.raw.get("f"))
    groups = groups_fn(P, X, nu, work)
    tol = wm.mpf(10) ** (-(work.digits - 6))
    try:
        extrap, bound, count = riesz_sum(groups, f, p, nu, work.num(alpha), work.num(beta), X,
                                              kappa, work, tol)
    except QuadratureError as exc:
        raise ConvergenceError(f"per-term integral failed: {exc}", getattr(exc, "diagnostics", {}))
    pref = mp.mpmathify(pref)
    value = pref * mp.mpmathify(extrap)
    bound = abs(pref) * abs(mp.mpmathify(bound))
    return TailEstimate(value, bound, count)


def _sc(P):
    mp = P.mp
    nu = P.num("nu")
    return mp.sinpi(nu / 2), mp.cospi(nu / 2)


def _pair(theta: Fraction, sign: int):
    return [(theta, 1), (1 - theta, sign)]


_ONE = [(Fraction(1), 1)]


def _single_groups(kernel_name, sign, exponent):
    def build(P, X, nu, work):
        mp = work.mp
        k = getattr(VoronoiKernel, kernel_name)(nu, mp)
        return [(k, product_lattice(X, _ONE, _pair(P.frac("theta"), sign), nu, exponent, mp))]
    return build


def _product_groups(kernel_name, psi_sign, theta_sign, printed_last_j=False):
    def build(P, X, nu, work):
        mp = work.mp
        k = getattr(VoronoiKernel, kernel_name)(nu, mp)
        th, ps = P.frac("theta"), P.frac("psi")
        outer = _pair(ps, psi_sign)
        inner = _pair(th, theta_sign)
        if not printed_last_j or P.raw.get("printed_j_sign") not in (True, "true", "1", 1):
            return [(k, product_lattice(X, outer, inner, nu, 1, mp))]
        # the (1-theta, 1-psi) cell with the J coefficient negated
        k2 = VoronoiKernel(k.kc, k.yc, -k.jc)
        return [(k, product_lattice(X, outer, inner[:1], nu, 1, mp)),
                (k, product_lattice(X, outer[:1], inner[1:], nu, 1, mp)),
                (k2, product_lattice(X, outer[1:], inner[1:], nu, 1, mp))]
    return build


def _chi_groups(kernel_name, parity):
    def build(P, X, nu, work):
        chi = P.character(parity=parity)
        q = chi.modulus
        w = DivisorWeight(WeightKind.SIGMA_BAR_CHI, z=-P.frac("nu"), chi=chi.conjugate())
        k = getattr(VoronoiKernel, kernel_name)(nu, work.mp)
        return [(k, divisor_lattice(X, q, w, nu, work))]
    return build


def _plain_groups(P, X, nu, work):
    w = DivisorWeight(WeightKind.PLAIN_SIGMA, z=-P.frac("nu"))
    return [(VoronoiKernel.W(nu, work.mp), divisor_lattice(X, 1, w, nu, work))]


def _trig(P, kind):
    return DivisorWeight(kind, z=-P.frac("nu"), theta=P.frac("theta"))


def _prod(P, combo):
    return DivisorWeight(WeightKind.TRIG_PRODUCT, z=-P.frac("nu"), theta=P.frac("theta"),
                         psi=P.frac("psi"), product_combo=combo)


def _hz_pair(P, s, sign):
    ctx = P.ctx
    th = ctx.num(P.frac("theta"))
    return hurwitz_zeta(s, th, ctx) + sign * hurwitz_zeta(s, 1 - th, ctx)


def _with_tail(main, tail: TailEstimate):
    return TailEstimate(main + tail.value, tail.bound, tail.terms_used)


# right sides ---------------------------------------------------------------


def _v_sin_d_rhs(P, budget):
    mp = P.mp
    nu = P.num("nu")
    s, c = _sc(P)
    main = -(2 * mp.pi) ** nu * gamma(-nu, P.ctx) * s * _hz_pair(P, -nu, -1) * _main_integral(P, 0)
    return _with_tail(main, _tail(P, _single_groups("Z", -1, 1), 0, budget, -mp.pi))


def _v_cos_d_rhs(P, budget):
    mp = P.mp
    nu = P.num("nu")
    s, c = _sc(P)
    main = (2 * mp.pi) ** nu * gamma(-nu, P.ctx) * c * _hz_pair(P, -nu, 1) * _main_integral(P, 0)
    return _with_tail(main, _tail(P, _single_groups("W", 1, 1), 0, budget, mp.pi))


def _v_sin_nd_rhs(P, budget):
    mp = P.mp
    nu = P.num("nu")
    s, c = _sc(P)
    main = gamma(nu, P.ctx) * s / (2 * mp.pi) ** nu * _hz_pair(P, nu, -1) * _main_integral(P, nu + 1)
    return _with_tail(main, _tail(P, _single_groups("Z_plus", -1, -1), 1, budget, mp.pi))


def _v_cos_nd_rhs(P, budget):
    mp = P.mp
    nu = P.num("nu")
    s, c = _sc(P)
    main = gamma(nu, P.ctx) * c / (2 * mp.pi) ** nu * _hz_pair(P, nu, 1) * _main_integral(P, nu)
    return _with_tail(main, _tail(P, _single_groups("W", 1, -1), 0, budget, mp.pi))


def _chi_norm(P, parity):
    chi = P.character(parity=parity)
    return chi, P.mp.mpf(chi.modulus) ** (1 + P.num("nu") / 2) / gauss_sum(chi, P.ctx)


def _v_chi_rhs(parity):
    kernel = "Z" if parity == "odd" else "W"

    def rhs(P, budget):
        mp = P.mp
        nu = P.num("nu")
        chi, norm = _chi_norm(P, parity)
        main = norm * dirichlet_L(1 + nu, chi, P.ctx) * _main_integral(P, 0)
        pref = 2 * mp.pi * (mp.mpc(0, 1) if parity == "odd" else 1)
        return _with_tail(main, _tail(P, _chi_groups(kernel, parity), 0, budget, pref))
    return rhs


def _v_chi_lhs(parity):
    def lhs(P, budget):
        chi, norm = _chi_norm(P, parity)
        return _lhs_sum(P, DivisorWeight(WeightKind.SIGMA_CHI, z=-P.frac("nu"), chi=chi), factor=norm)
    return lhs


def _o_voronoi_rhs(P, budget):
    mp = P.mp
    ctx = P.ctx
    nu = P.num("nu")
    main = (riemann_zeta(1 - nu, ctx) * _main_integral(P, nu)
            + riemann_zeta(1 + nu, ctx) * _main_integral(P, 0))
    return _with_tail(main, _tail(P, _plain_groups, 0, budget, 2 * mp.pi))


def _prod_rhs(kernel, psi_sign, theta_sign, p, pref_sign, printed_last_j=False):
    def rhs(P, budget):
        mp = P.mp
        groups = _product_groups(kernel, psi_sign, theta_sign, printed_last_j)
        return _tail(P, groups, p, budget, pref_sign * mp.pi / 2)
    return rhs


_SS = (("sin", "d"), ("sin", "n_over_d"))
_CC = (("cos", "d"), ("cos", "n_over_d"))
_CS = (("cos", "d"), ("sin", "n_over_d"))
_SC = (("sin", "d"), ("cos", "n_over_d"))


def theorems():
    from .identities import Section, Theorem, _check_unit

    def check(trig=("theta",), chi=None, lo=Fraction(0)):
        def fn(P, budget):
            _check_interval(P, lo)
            for name in trig:
                _check_unit(P, name)
            if chi:
                P.character(parity=chi)
        return fn

    base = ("nu", "alpha", "beta")
    th = base + ("theta",)
    tp = base + ("theta", "psi")
    V = Section.VORONOI
    return [
        Theorem("V_SIN_D", V, "d^-nu sin(2 pi d theta) f(j)", th, check(),
                lambda P, b: _lhs_sum(P, _trig(P, WeightKind.TRIG_SIN_D)), _v_sin_d_rhs),
        Theorem("V_CHI_ODD", V, "sigma_{-nu,chi}(j) f(j), chi odd primitive", base + ("q",), check((), "odd"),
                _v_chi_lhs("odd"), _v_chi_rhs("odd")),
        Theorem("V_SIN_ND", V, "d^-nu sin(2 pi j theta/d) f(j)/j", th, check(),
                lambda P, b: _lhs_sum(P, _trig(P, WeightKind.TRIG_SIN_N_OVER_D), divide_by_j=True),
                _v_sin_nd_rhs),
        Theorem("V_COS_D", V, "d^-nu cos(2 pi d theta) f(j)", th, check(),
                lambda P, b: _lhs_sum(P, _trig(P, WeightKind.TRIG_COS_D)), _v_cos_d_rhs),
        Theorem("V_CHI_EVEN", V, "sigma_{-nu,chi}(j) f(j), chi even non-principal primitive", base + ("q",),
                check((), "even"), _v_chi_lhs("even"), _v_chi_rhs("even")),
        Theorem("V_COS_ND", V, "d^-nu cos(2 pi j theta/d) f(j)", th, check(),
                lambda P, b: _lhs_sum(P, _trig(P, WeightKind.TRIG_COS_N_OVER_D)), _v_cos_nd_rhs),
        Theorem("V_CC", V, "d^-nu cos(2 pi d theta) cos(2 pi j psi/d) f(j)", tp, check(("theta", "psi")),
                lambda P, b: _lhs_sum(P, _prod(P, _CC)), _prod_rhs("W", 1, 1, 0, 1)),
        Theorem("V_SS", V, "d^-nu sin(2 pi d theta) sin(2 pi j psi/d) f(j)/j", tp, check(("theta", "psi")),
                lambda P, b: _lhs_sum(P, _prod(P, _SS), divide_by_j=True), _prod_rhs("W_plus", -1, -1, 1, 1)),
        Theorem("V_CS", V, "d^-nu cos(2 pi d theta) sin(2 pi j psi/d) f(j)/j", tp, check(("theta", "psi")),
                lambda P, b: _lhs_sum(P, _prod(P, _CS), divide_by_j=True),
                _prod_rhs("Z_plus", -1, 1, 1, 1, printed_last_j=True)),
        Theorem("V_SC", V, "d^-nu sin(2 pi d theta) cos(2 pi j psi/d) f(j)", tp, check(("theta", "psi")),
                lambda P, b: _lhs_sum(P, _prod(P, _SC)), _prod_rhs("Z", 1, -1, 0, -1)),
        Theorem("O_VORONOI", Section.ORACLE, "sigma_{-nu}(j) f(j) Voronoi formula", base,
                check((), None, Fraction(-1, 2)),
                lambda P, b: _lhs_sum(P, DivisorWeight(WeightKind.PLAIN_SIGMA, z=-P.frac("nu"))),
                _o_voronoi_rhs, tolerance="1e-3"),
    ]
