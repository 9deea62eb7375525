"""Registry of Bessel-K divisor-series identities and their verification.

Every entry binds an identifier to a parameter check, a left-side evaluator
(the K-Bessel series, summed directly) and a right-side evaluator (closed
forms plus lattice sums from ``series``).  The two sides never share a
series evaluator, so the residual between them is a genuine test.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable

from .arithmetic import DivisorWeight, WeightKind, r6_bruteforce
from .characters import (
    DirichletCharacter,
    dirichlet_L,
    enumerate_characters,
    gauss_sum,
)
from .errors import ConvergenceError, HypothesisError, PoleProximityError, ZetaBesselError
from .precision import EvaluationBudget, PrecisionContext, with_guard
from .series import (
    Progression,
    TailEstimate,
    bessel_lhs_series,
    cohen_tail_series,
    rational_rhs_series,
    theta_grid_series,
    _dec,
)
from .special import ZetaPairKind, gamma, riemann_zeta, zeta_pair

DIFF = ZetaPairKind.DIFFERENCE
SUM = ZetaPairKind.SUM


class Section(str, Enum):
    MAIN = "main"
    COHEN = "cohen"
    VORONOI = "voronoi"
    ORACLE = "oracle"


DEFAULT_TOLERANCE = {
    Section.MAIN: "1e-8",
    Section.COHEN: "1e-6",
    Section.VORONOI: "1e-3",
    Section.ORACLE: "1e-8",
}


@dataclass(frozen=True)
class IdentityCase:
    id: str
    params: dict = field(default_factory=dict, hash=False)
    notes: str = ""


@dataclass
class VerificationReport:
    case: IdentityCase
    lhs: object
    rhs: object
    abs_residual: object
    rel_residual: object
    lhs_tail: dict
    rhs_tail: dict
    passed: bool
    runtime_ms: int
    tolerance: str = ""
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "case": {"id": self.case.id, "params": {k: str(v) for k, v in self.case.params.items()},
                     "notes": self.case.notes},
            "lhs": _num_str(self.lhs),
            "rhs": _num_str(self.rhs),
            "abs_residual": _num_str(self.abs_residual),
            "rel_residual": _num_str(self.rel_residual),
            "lhs_tail": self.lhs_tail,
            "rhs_tail": self.rhs_tail,
            "passed": self.passed,
            "runtime_ms": self.runtime_ms,
            "tolerance": self.tolerance,
            "error": self.error,
        }


def _num_str(v):
    if v is None:
        return None
    return _dec(v, 40)


# --------------------------------------------------------------------------
# parameters


class Params:
    """Typed access to a case's parameter map at a given precision.

    Real parameters are parsed through ``Fraction(str(value))`` so decimal
    strings such as "0.27" and ratios such as "1/3" are taken exactly.
    """

    def __init__(self, raw: dict, ctx: PrecisionContext):
        self.raw = dict(raw)
        self.ctx = ctx
        self.mp = ctx.mp

    def has(self, name):
        return self.raw.get(name) is not None

    def frac(self, name, default=None) -> Fraction:
        v = self.raw.get(name, default)
        if v is None:
            raise HypothesisError(f"missing parameter {name}")
        try:
            return Fraction(str(v))
        except (ValueError, ZeroDivisionError) as exc:
            raise HypothesisError(f"parameter {name} is not a real number: {v!r}") from exc

    def num(self, name, default=None):
        return self.ctx.num(self.frac(name, default))

    def int(self, name, default=None) -> int:
        f = self.frac(name, default)
        if f.denominator != 1:
            raise HypothesisError(f"{name} must be an integer")
        return int(f)

    # common shorthands
    @property
    def nu(self):
        return self.num("nu")

    @property
    def x(self):
        return self.num("x")

    @property
    def k(self):
        return self.int("k")

    @property
    def theta(self) -> Fraction:
        return self.frac("theta")

    @property
    def psi(self) -> Fraction:
        return self.frac("psi")

    def a(self, default=None):
        return self.num("a", default)

    def character(self, modulus_key="q", selector="chi", parity=None, primitive=True,
                  principal=False) -> DirichletCharacter:
        q = self.int(modulus_key)
        if q < 1:
            raise HypothesisError(f"{modulus_key} must be positive")
        group = enumerate_characters(q)
        sel = self.raw.get(selector, 0)
        if isinstance(sel, str) and sel.strip().startswith("["):
            label = tuple(int(t) for t in sel.strip("[] ").split(",") if t.strip())
            chi = group.find(label)
        else:
            pool = [c for c in group.characters
                    if (parity is None or c.parity == parity)
                    and (not primitive or c.is_primitive)
                    and (principal or not c.is_principal)]
            idx = int(sel)
            if not pool:
                raise HypothesisError(f"no {parity or ''} primitive character mod {q}".replace("  ", " "))
            if not 0 <= idx < len(pool):
                raise HypothesisError(f"{selector} index out of range (0..{len(pool) - 1})")
            chi = pool[idx]
        if parity is not None and chi.parity != parity:
            raise HypothesisError(f"{selector} must be an {parity} character")
        if primitive and not chi.is_primitive:
            raise HypothesisError(f"{selector} must be primitive")
        if not principal and chi.is_principal:
            raise HypothesisError(f"{selector} must be non-principal")
        return chi


# --------------------------------------------------------------------------
# validity predicates


def _require(cond, message):
    if not cond:
        raise HypothesisError(message)


def _check_k(P: Params, parity: str, minimum: int):
    k = P.k
    _require(k >= minimum, f"k must be >= {minimum}")
    if parity == "even":
        _require(k % 2 == 0, "k must be even")
    else:
        _require(k % 2 == 1, "k must be odd")


def _check_unit(P: Params, name):
    v = P.frac(name)
    _require(0 < v < 1, f"{name} must lie in (0, 1)")


def _check_positive(P: Params, *names):
    for name in names:
        _require(P.frac(name) > 0, f"{name} must be positive")


def _check_main(P: Params, parity, minimum, trig=("theta",)):
    _check_positive(P, "nu", "a", "x")
    _check_k(P, parity, minimum)
    for name in trig:
        _check_unit(P, name)


def _check_cohen(P: Params, trig=("theta",)):
    _check_positive(P, "x")
    nu = P.frac("nu")
    _require(nu >= 0, "nu must be >= 0")
    _require(nu.denominator != 1, "nu must not be an integer")
    n_min = math.floor((nu + 1) / 2)
    _require(P.int("N") >= n_min, f"N must be >= floor((nu+1)/2) = {n_min}")
    for name in trig:
        _check_unit(P, name)
    if P.has("a"):
        a = P.num("a")
        _require(abs(a - 4 * P.mp.pi) <= P.mp.mpf(10) ** (-10) * a, "a must equal 4*pi for this identity")


def _pole_distance(x: Fraction, offsets_u, offsets_v) -> Fraction:
    """Smallest relative distance from x to a product (m + s)(n + t) with m, n >= 0."""
    best = None
    for s in offsets_u:
        for t in offsets_v:
            m = 0
            while (m + s) * t <= 2 * x:
                n_exact = x / (m + s) - t
                for n in (math.floor(n_exact), math.ceil(n_exact)):
                    if n >= 0:
                        dist = abs((m + s) * (n + t) - x) / x
                        best = dist if best is None or dist < best else best
                m += 1
    return best if best is not None else Fraction(1)


def _check_pole_set(P: Params, offsets_u, offsets_v, budget: EvaluationBudget):
    if budget.options.get("allow_pole_set"):
        return
    dist = _pole_distance(P.frac("x"), offsets_u, offsets_v)
    if dist < Fraction(1, 10**4):
        raise HypothesisError("x in pole set")


# --------------------------------------------------------------------------
# theorem records


@dataclass(frozen=True)
class Theorem:
    id: str
    section: Section
    summary: str
    required: tuple
    check: Callable
    lhs: Callable
    rhs: Callable
    tolerance: str | None = None

    def validate(self, params: dict, ctx: PrecisionContext, budget: EvaluationBudget):
        missing = [r for r in self.required if params.get(r) is None]
        if missing:
            raise HypothesisError(f"missing parameter(s): {', '.join(missing)}")
        self.check(Params(params, ctx), budget)


_REGISTRY: dict[str, Theorem] = {}


def _register(id, section, summary, required, check, lhs, rhs):
    _REGISTRY[id] = Theorem(id, section, summary, tuple(required), check, lhs, rhs)


def registry() -> dict[str, Theorem]:
    if not any(t.section is Section.VORONOI for t in _REGISTRY.values()):
        from . import voronoi

        for t in voronoi.theorems():
            _REGISTRY[t.id] = t
    return _REGISTRY


def get_theorem(id: str) -> Theorem:
    reg = registry()
    if id not in reg:
        raise HypothesisError(f"unknown identity id {id!r}")
    return reg[id]


# --------------------------------------------------------------------------
# shared blocks


def _prefactor(P: Params, k):
    a, x, nu = P.a(), P.x, P.nu
    return (a * a * x / 4) ** (nu / 2 + k + 1)


def _scale(P: Params):
    a, x = P.a(), P.x
    return 16 * P.mp.pi ** 2 / (a * a * x)


def _sgn_even(k):  # (-1)^(k/2)
    return -1 if (k // 2) % 2 else 1


def _sgn_odd_plus(k):  # (-1)^((k+1)/2)
    return -1 if ((k + 1) // 2) % 2 else 1


def _sgn_odd_minus(k):  # (-1)^((k-1)/2)
    return -1 if ((k - 1) // 2) % 2 else 1


def _lhs_weight(P: Params, weight, k, budget):
    return bessel_lhs_series(weight, P.nu, P.a(), P.x, budget, P.ctx, k=k)


def _scaled(est: TailEstimate, factor, add=0) -> TailEstimate:
    return TailEstimate(est.value * factor + add, abs(factor) * est.bound, est.terms_used)


def _closed(value) -> TailEstimate:
    return TailEstimate(value, 0, 0)


def _trig_weight(P, kind, z):
    return DivisorWeight(kind, z=z, theta=P.theta)


def _product_weight(P, combo, z):
    return DivisorWeight(WeightKind.TRIG_PRODUCT, z=z, theta=P.theta, psi=P.psi, product_combo=combo)


def _zeta_x_term(P, k, pair_kind):
    """a^(2k+2) k! Gamma(nu) (zeta(k+1,theta) +/- zeta(k+1,1-theta)) x^(k+1) / (2^(2k+4) (2 pi)^(k+1))."""
    mp = P.mp
    a, x, nu = P.a(), P.x, P.nu
    return (a ** (2 * k + 2) * math.factorial(k) / (mp.mpf(2) ** (2 * k + 4) * (2 * mp.pi) ** (k + 1))
            * gamma(nu, P.ctx) * zeta_pair(k + 1, P.theta, pair_kind, P.ctx) * x ** (k + 1))


# --------------------------------------------------------------------------
# main theorems (sine family)


def _t_odd1_lhs(P, budget):
    return _lhs_weight(P, _trig_weight(P, WeightKind.TRIG_SIN_D, P.k), P.k, budget)


def _t_odd1_rhs(P, budget):
    mp, k, nu = P.mp, P.k, P.nu
    s = _sgn_even(k)
    closed = -s * _zeta_x_term(P, k, DIFF)
    if k == 0:
        closed += mp.pi * gamma(1 + nu, P.ctx) / 4 * zeta_pair(0, P.theta, DIFF, P.ctx)
    S = theta_grid_series(Progression.integers(), k, Progression.shifted_pair(P.theta, -1), 0,
                          nu, k, _scale(P), budget, P.ctx)
    return _scaled(S, s * (2 * mp.pi) ** (k + 1) / 4, closed)


_register("T_ODD1", Section.MAIN, "sum_{d|n} d^k sin(2 pi d theta), k even",
          ("k", "nu", "a", "x", "theta"), lambda P, b: _check_main(P, "even", 0), _t_odd1_lhs, _t_odd1_rhs)


def _t_m1_lhs(P, budget):
    chi = P.character(parity="odd")
    return _lhs_weight(P, DivisorWeight(WeightKind.SIGMA_CHI, z=P.k, chi=chi), P.k, budget)


def _t_m1_rhs(P, budget):
    mp, k, nu, a, x = P.mp, P.k, P.nu, P.a(), P.x
    chi = P.character(parity="odd")
    q = chi.modulus
    ctx = P.ctx
    tau = gauss_sum(chi, ctx)
    s = _sgn_even(k)
    i = mp.mpc(0, 1)
    closed = (s * i * math.factorial(k) * mp.mpf(q) ** k * a ** (2 * k + 2)
              / (mp.mpf(2) ** (2 * k + 3) * (2 * mp.pi) ** (k + 1))
              * gamma(nu, ctx) * tau * dirichlet_L(1 + k, chi.conjugate(), ctx) * x ** (k + 1))
    if k == 0:
        closed += gamma(1 + nu, ctx) * dirichlet_L(1, chi, ctx) / 2
    w = DivisorWeight(WeightKind.SIGMA_BAR_CHI, z=k, chi=chi.conjugate())
    S = rational_rhs_series(w, nu, k, _scale(P) / q, budget, ctx)
    return _scaled(S, -s * i / (2 * q) * tau * (2 * mp.pi) ** (k + 1), closed)


def _check_chi(P, parity, key="q", selector="chi"):
    P.character(key, selector, parity=parity)


_register("T_M1", Section.MAIN, "sigma_{k,chi}, chi odd primitive, k even",
          ("k", "nu", "a", "x", "q"),
          lambda P, b: (_check_main(P, "even", 0, ()), _check_chi(P, "odd")), _t_m1_lhs, _t_m1_rhs)


def _t_odd2_lhs(P, budget):
    return _lhs_weight(P, _trig_weight(P, WeightKind.TRIG_SIN_N_OVER_D, P.k), P.k, budget)


def _t_odd2_rhs(P, budget):
    mp, k, nu = P.mp, P.k, P.nu
    s = _sgn_even(k)
    closed = (s * mp.mpf(2) ** k * mp.pi ** (k + 1) / 4 * gamma(nu + k + 1, P.ctx)
              * zeta_pair(-k, P.theta, DIFF, P.ctx))
    S = theta_grid_series(Progression.integers(), 0, Progression.shifted_pair(P.theta, -1), k,
                          nu, k, _scale(P), budget, P.ctx)
    return _scaled(S, s * (2 * mp.pi) ** (k + 1) / 4, closed)


_register("T_ODD2", Section.MAIN, "sum_{d|n} d^k sin(2 pi n theta/d), k even >= 2",
          ("k", "nu", "a", "x", "theta"), lambda P, b: _check_main(P, "even", 2), _t_odd2_lhs, _t_odd2_rhs)


def _t_m2_lhs(P, budget):
    chi = P.character(parity="odd")
    return _lhs_weight(P, DivisorWeight(WeightKind.SIGMA_BAR_CHI, z=P.k, chi=chi), P.k, budget)


def _t_m2_rhs(P, budget):
    mp, k, nu = P.mp, P.k, P.nu
    ctx = P.ctx
    chi = P.character(parity="odd")
    q = chi.modulus
    tau = gauss_sum(chi, ctx)
    closed = math.factorial(k) / mp.mpf(2) * gamma(nu + k + 1, ctx) * dirichlet_L(1 + k, chi, ctx)
    w = DivisorWeight(WeightKind.SIGMA_CHI, z=k, chi=chi.conjugate())
    S = rational_rhs_series(w, nu, k, _scale(P) / q, budget, ctx)
    return _scaled(S, -_sgn_even(k) * mp.mpc(0, 1) / 2 * tau * (2 * mp.pi / q) ** (k + 1), closed)


_register("T_M2", Section.MAIN, "bar-sigma_{k,chi}, chi odd primitive, k even >= 2",
          ("k", "nu", "a", "x", "q"),
          lambda P, b: (_check_main(P, "even", 2, ()), _check_chi(P, "odd")), _t_m2_lhs, _t_m2_rhs)


# --------------------------------------------------------------------------
# r6 corollaries


def _r6_rhs_series(P, theta, budget):
    """sum_n sum_m {(n^2 - 4(m+t)^2) Gamma(nu+3)/(1 + c n (m+t))^(nu+3) - (t -> 1-t)}."""
    c = _scale(P)
    pair = Progression.shifted_pair(theta, -1)
    A = theta_grid_series(Progression.integers(), 2, pair, 0, P.nu, 2, c, budget, P.ctx)
    B = theta_grid_series(Progression.integers(), 0, pair, 2, P.nu, 2, c, budget, P.ctx)
    return TailEstimate(A.value - 4 * B.value, A.bound + 4 * B.bound, A.terms_used + B.terms_used)


def _c_r6_trig_lhs(P, budget):
    ctx = P.ctx
    w1 = _trig_weight(P, WeightKind.TRIG_SIN_N_OVER_D, 2)
    w2 = _trig_weight(P, WeightKind.TRIG_SIN_D, 2)
    from .arithmetic import weighted_divisor_sum

    def wfn(n):
        return 16 * weighted_divisor_sum(n, w1, ctx) - 4 * weighted_divisor_sum(n, w2, ctx)

    return bessel_lhs_series(None, P.nu, P.a(), P.x, budget, ctx, k=2, weight_fn=wfn, envelope=(40, 2.5))


def _c_r6_trig_rhs(P, budget):
    mp, nu, a, x = P.mp, P.nu, P.a(), P.x
    th = P.ctx.num(P.theta)
    cot = mp.cot(mp.pi * th)
    closed = (mp.mpf(16) / 3 * mp.pi ** 3 * gamma(nu + 3, P.ctx) * (th - 3 * th ** 2 + 2 * th ** 3)
              - a ** 6 / 256 * gamma(nu, P.ctx) * (cot + cot ** 3) * x ** 3)
    S = _r6_rhs_series(P, P.theta, budget)
    return _scaled(S, (2 * mp.pi) ** 3, closed)


_register("C_R6_TRIG", Section.MAIN, "16 sin(2 pi n theta/d) - 4 sin(2 pi d theta), k = 2",
          ("nu", "a", "x", "theta"), lambda P, b: (_check_positive(P, "nu", "a", "x"), _check_unit(P, "theta")),
          _c_r6_trig_lhs, _c_r6_trig_rhs)


def _c_r6_lhs(P, budget):
    return bessel_lhs_series(None, P.nu, P.a(), P.x, budget, P.ctx, k=2, weight_fn=r6_bruteforce,
                             envelope=(40, 2.5))


def _c_r6_rhs(P, budget):
    mp, nu, a, x = P.mp, P.nu, P.a(), P.x
    closed = mp.pi ** 3 / 2 * gamma(nu + 3, P.ctx) - a ** 6 / 128 * gamma(nu, P.ctx) * x ** 3
    S = _r6_rhs_series(P, Fraction(1, 4), budget)
    return _scaled(S, (2 * mp.pi) ** 3, closed)


_register("C_R6", Section.MAIN, "sum r6(n) n^(nu/2) K_nu(a sqrt(n x))", ("nu", "a", "x"),
          lambda P, b: _check_positive(P, "nu", "a", "x"), _c_r6_lhs, _c_r6_rhs)


def _c_r6_exp_lhs(P, budget):
    mp = P.mp
    w = with_guard(P.ctx, 10)
    x = w.mp.mpf(P.x)
    eps = budget.tail_eps(P.ctx)
    total = w.mp.mpf(0)
    n = 0
    c = 4 * w.mp.pi * w.mp.sqrt(x)
    while True:
        n += 1
        term = r6_bruteforce(n) * w.mp.exp(-c * w.mp.sqrt(n))
        total += term
        # r6(n) <= 40 n^(5/2); geometric comparison of the envelope
        env = 40 * w.mp.mpf(n) ** 2.5 * w.mp.exp(-c * w.mp.sqrt(n))
        r = w.mp.exp(-c * (w.mp.sqrt(n + 1) - w.mp.sqrt(n))) * (w.mp.mpf(n + 1) / n) ** 2.5
        if n > 4 and r < 1:
            bound = env * r / (1 - r)
            if bound <= eps:
                break
        if n > budget.max_terms_outer:
            raise ConvergenceError("r6 exponential series exceeded budget", {"n": n})
    return TailEstimate(mp.mpf(total), mp.mpf(bound), n)


def _c_r6_exp_rhs(P, budget):
    mp = P.mp
    x = P.x
    rho = mp.mpf(7) / 2
    pair = Progression.shifted_pair(Fraction(1, 4), -1)
    c = 1 / x
    # theta_grid_series multiplies by Gamma(nu+k+1); nu=1/2, k=2 gives exponent 7/2
    half = mp.mpf(1) / 2
    A = theta_grid_series(Progression.integers(), 2, pair, 0, half, 2, c, budget, P.ctx)
    B = theta_grid_series(Progression.integers(), 0, pair, 2, half, 2, c, budget, P.ctx)
    g = gamma(rho, P.ctx)
    S = TailEstimate((A.value - 4 * B.value) / g, (A.bound + 4 * B.bound) / g, A.terms_used + B.terms_used)
    closed = 15 / (512 * mp.pi ** 3) / x ** 3 - 1
    return _scaled(S, 15 / (32 * mp.pi ** 3) / x ** 3, closed)


_register("C_R6_EXP", Section.MAIN, "sum r6(n) exp(-4 pi sqrt(n x))", ("x",),
          lambda P, b: _check_positive(P, "x"), _c_r6_exp_lhs, _c_r6_exp_rhs)


# --------------------------------------------------------------------------
# main theorems (cosine family)


def _t_even1_lhs(P, budget):
    return _lhs_weight(P, _trig_weight(P, WeightKind.TRIG_COS_D, P.k), P.k, budget)


def _t_even1_rhs(P, budget):
    mp, k, nu, a, x = P.mp, P.k, P.nu, P.a(), P.x
    closed = _sgn_odd_minus(k) * _zeta_x_term(P, k, SUM)
    if k == 1:
        closed -= a * a / 16 * gamma(1 + nu, P.ctx) * x
    S = theta_grid_series(Progression.integers(), k, Progression.shifted_pair(P.theta, 1), 0,
                          nu, k, _scale(P), budget, P.ctx)
    return _scaled(S, _sgn_odd_plus(k) * (2 * mp.pi) ** (k + 1) / 4, closed)


_register("T_EVEN1", Section.MAIN, "sum_{d|n} d^k cos(2 pi d theta), k odd",
          ("k", "nu", "a", "x", "theta"), lambda P, b: _check_main(P, "odd", 1), _t_even1_lhs, _t_even1_rhs)


def _t_even1_chi_lhs(P, budget):
    chi = P.character(parity="even")
    return _lhs_weight(P, DivisorWeight(WeightKind.SIGMA_CHI, z=P.k, chi=chi), P.k, budget)


def _t_even1_chi_rhs(P, budget):
    mp, k, nu, a, x = P.mp, P.k, P.nu, P.a(), P.x
    ctx = P.ctx
    chi = P.character(parity="even")
    q = chi.modulus
    tau = gauss_sum(chi, ctx)
    closed = (_sgn_odd_minus(k) * math.factorial(k) * a ** (2 * k + 2) * mp.mpf(q) ** k
              / (mp.mpf(2) ** (2 * k + 3) * (2 * mp.pi) ** (k + 1))
              * tau * gamma(nu, ctx) * dirichlet_L(1 + k, chi.conjugate(), ctx) * x ** (k + 1))
    w = DivisorWeight(WeightKind.SIGMA_BAR_CHI, z=k, chi=chi.conjugate())
    S = rational_rhs_series(w, nu, k, _scale(P) / q, budget, ctx)
    return _scaled(S, _sgn_odd_plus(k) / (2 * mp.mpf(q)) * tau * (2 * mp.pi) ** (k + 1), closed)


_register("T_EVEN1_CHI", Section.MAIN, "sigma_{k,chi}, chi even non-principal primitive, k odd",
          ("k", "nu", "a", "x", "q"),
          lambda P, b: (_check_main(P, "odd", 1, ()), _check_chi(P, "even")), _t_even1_chi_lhs, _t_even1_chi_rhs)


def _t_even2_lhs(P, budget):
    return _lhs_weight(P, _trig_weight(P, WeightKind.TRIG_COS_N_OVER_D, P.k), P.k, budget)


def _t_even2_rhs(P, budget):
    mp, k, nu, a, x = P.mp, P.k, P.nu, P.a(), P.x
    ctx = P.ctx
    s = _sgn_odd_plus(k)
    closed = (s * (2 * mp.pi) ** (k + 1) / 8 * gamma(nu + k + 1, ctx) * zeta_pair(-k, P.theta, SUM, ctx)
              - a ** (2 * k + 2) / mp.mpf(2) ** (2 * k + 4) * riemann_zeta(-k, ctx) * gamma(nu, ctx) * x ** (k + 1))
    S = theta_grid_series(Progression.integers(), 0, Progression.shifted_pair(P.theta, 1), k,
                          nu, k, _scale(P), budget, ctx)
    return _scaled(S, s * (2 * mp.pi) ** (k + 1) / 4, closed)


_register("T_EVEN2", Section.MAIN, "sum_{d|n} d^k cos(2 pi n theta/d), k odd",
          ("k", "nu", "a", "x", "theta"), lambda P, b: _check_main(P, "odd", 1), _t_even2_lhs, _t_even2_rhs)


def _t_even2_chi_lhs(P, budget):
    chi = P.character(parity="even")
    return _lhs_weight(P, DivisorWeight(WeightKind.SIGMA_BAR_CHI, z=P.k, chi=chi), P.k, budget)


def _t_even2_chi_rhs(P, budget):
    mp, k, nu = P.mp, P.k, P.nu
    ctx = P.ctx
    chi = P.character(parity="even")
    q = chi.modulus
    tau = gauss_sum(chi, ctx)
    closed = math.factorial(k) / mp.mpf(2) * gamma(nu + k + 1, ctx) * dirichlet_L(1 + k, chi, ctx)
    w = DivisorWeight(WeightKind.SIGMA_CHI, z=k, chi=chi.conjugate())
    S = rational_rhs_series(w, nu, k, _scale(P) / q, budget, ctx)
    return _scaled(S, _sgn_odd_plus(k) / mp.mpf(2) * tau * (2 * mp.pi / q) ** (k + 1), closed)


_register("T_EVEN2_CHI", Section.MAIN, "bar-sigma_{k,chi}, chi even non-principal primitive, k odd",
          ("k", "nu", "a", "x", "q"),
          lambda P, b: (_check_main(P, "odd", 1, ()), _check_chi(P, "even")), _t_even2_chi_lhs, _t_even2_chi_rhs)


# --------------------------------------------------------------------------
# two trigonometric factors


def _two_grid(P, psi_sign, theta_sign, budget):
    return theta_grid_series(Progression.shifted_pair(P.psi, psi_sign), P.k,
                             Progression.shifted_pair(P.theta, theta_sign), 0,
                             P.nu, P.k, _scale(P), budget, P.ctx)


def _product_lhs(combo):
    def lhs(P, budget):
        return _lhs_weight(P, _product_weight(P, combo, P.k), P.k, budget)
    return lhs


def _t_sinsin_rhs(P, budget):
    S = _two_grid(P, -1, -1, budget)
    return _scaled(S, -_sgn_odd_plus(P.k) * (2 * P.mp.pi) ** (P.k + 1) / 8)


def _t_coscos_rhs(P, budget):
    k = P.k
    closed = _sgn_odd_minus(k) * _zeta_x_term(P, k, SUM)
    S = _two_grid(P, 1, 1, budget)
    return _scaled(S, _sgn_odd_plus(k) * (2 * P.mp.pi) ** (k + 1) / 8, closed)


def _t_cossin_rhs(P, budget):
    S = _two_grid(P, -1, 1, budget)
    return _scaled(S, _sgn_even(P.k) * (2 * P.mp.pi) ** (P.k + 1) / 8)


def _t_sincos_rhs(P, budget):
    k = P.k
    closed = -_sgn_even(k) * _zeta_x_term(P, k, DIFF)
    S = _two_grid(P, 1, -1, budget)
    return _scaled(S, _sgn_even(k) * (2 * P.mp.pi) ** (k + 1) / 8, closed)


_SS = (("sin", "d"), ("sin", "n_over_d"))
_CC = (("cos", "d"), ("cos", "n_over_d"))
_CS = (("cos", "d"), ("sin", "n_over_d"))
_SC = (("sin", "d"), ("cos", "n_over_d"))
_TWO = ("k", "nu", "a", "x", "theta", "psi")

_register("T_SINSIN", Section.MAIN, "d^k sin(2 pi d theta) sin(2 pi n psi/d), k odd", _TWO,
          lambda P, b: _check_main(P, "odd", 1, ("theta", "psi")), _product_lhs(_SS), _t_sinsin_rhs)
_register("T_COSCOS", Section.MAIN, "d^k cos(2 pi d theta) cos(2 pi n psi/d), k odd", _TWO,
          lambda P, b: _check_main(P, "odd", 1, ("theta", "psi")), _product_lhs(_CC), _t_coscos_rhs)
_register("T_COSSIN", Section.MAIN, "d^k cos(2 pi d theta) sin(2 pi n psi/d), k even >= 2", _TWO,
          lambda P, b: _check_main(P, "even", 2, ("theta", "psi")), _product_lhs(_CS), _t_cossin_rhs)
_register("T_SINCOS", Section.MAIN, "d^k sin(2 pi d theta) cos(2 pi n psi/d), k even", _TWO,
          lambda P, b: _check_main(P, "even", 0, ("theta", "psi")), _product_lhs(_SC), _t_sincos_rhs)


def _chi_pair(P, mixed):
    if not mixed:
        par = P.raw.get("parity", "odd")
        _require(par in ("odd", "even"), "parity must be 'odd' or 'even'")
        return (P.character("p", "chi1", parity=par), P.character("q", "chi2", parity=par))
    first = P.raw.get("even_first", True)
    first = first if isinstance(first, bool) else str(first).lower() in ("1", "true", "yes")
    if first:
        return P.character("p", "chi1", parity="even"), P.character("q", "chi2", parity="odd")
    return P.character("p", "chi1", parity="odd"), P.character("q", "chi2", parity="even")


def _chi12_lhs(mixed):
    def lhs(P, budget):
        c1, c2 = _chi_pair(P, mixed)
        return _lhs_weight(P, DivisorWeight(WeightKind.SIGMA_CHI1_CHI2, z=P.k, chi1=c1, chi2=c2), P.k, budget)
    return lhs


def _chi12_rhs(mixed):
    def rhs(P, budget):
        mp, k = P.mp, P.k
        ctx = P.ctx
        c1, c2 = _chi_pair(P, mixed)
        p, q = c1.modulus, c2.modulus
        w = DivisorWeight(WeightKind.SIGMA_CHI1_CHI2, z=k, chi1=c2.conjugate(), chi2=c1.conjugate())
        S = rational_rhs_series(w, P.nu, k, _scale(P) / (p * q), budget, ctx)
        pref = (2 * mp.pi / q) ** (k + 1) * gauss_sum(c1, ctx) * gauss_sum(c2, ctx)
        if mixed:
            pref *= _sgn_even(k) / (2 * mp.mpc(0, 1) * p)
        else:
            pref *= _sgn_odd_plus(k) / (2 * mp.mpf(p))
        return _scaled(S, pref)
    return rhs


_register("T_CHI12_SAME", Section.MAIN, "sigma_{k,chi1,chi2}, same parity, k odd", ("k", "nu", "a", "x", "p", "q"),
          lambda P, b: (_check_main(P, "odd", 1, ()), _chi_pair(P, False)), _chi12_lhs(False), _chi12_rhs(False))
_register("T_CHI12_MIX", Section.MAIN, "sigma_{k,chi1,chi2}, one even one odd, k even", ("k", "nu", "a", "x", "p", "q"),
          lambda P, b: (_check_main(P, "even", 0, ()), _chi_pair(P, True)), _chi12_lhs(True), _chi12_rhs(True))


# --------------------------------------------------------------------------
# oracle propositions


def _o_sigma_lhs(P, budget):
    return _lhs_weight(P, DivisorWeight(WeightKind.PLAIN_SIGMA, z=P.k), P.k, budget)


def _o_sigma_rhs(P, budget):
    mp, k, nu, a, x = P.mp, P.k, P.nu, P.a(), P.x
    ctx = P.ctx
    Q = (-a ** (2 * k + 2) * gamma(nu, ctx) * riemann_zeta(-k, ctx) / mp.mpf(2) ** (2 * k + 4) * x ** (k + 1)
         + a ** (2 * k) * gamma(1 + nu, ctx) * riemann_zeta(1 - k, ctx) / mp.mpf(2) ** (2 * k + 1) * x ** k
         + gamma(1 + k + nu, ctx) * math.factorial(k) * riemann_zeta(1 + k, ctx) / 2)
    S = rational_rhs_series(DivisorWeight(WeightKind.PLAIN_SIGMA, z=k), nu, k, _scale(P), budget, ctx)
    return _scaled(S, _sgn_odd_plus(k) / mp.mpf(2) * (2 * mp.pi) ** (k + 1), Q)


_register("O_SIGMA_K", Section.ORACLE, "sigma_k(n) K-Bessel series, k odd", ("k", "nu", "a", "x"),
          lambda P, b: _check_main(P, "odd", 1, ()), _o_sigma_lhs, _o_sigma_rhs)


# --------------------------------------------------------------------------
# Cohen-type identities (z = -nu, a = 4 pi)


def _cohen_lhs_weight(weight):
    def lhs(P, budget):
        mp = P.mp
        nu, x = P.nu, P.x
        est = bessel_lhs_series(weight(P), nu, 4 * mp.pi, x, budget, P.ctx, prefactor=False)
        return _scaled(est, 8 * mp.pi * x ** (nu / 2))
    return lhs


def _cs(P):
    mp = P.mp
    h = mp.pi * P.nu / 2
    return mp.sin(h), mp.cos(h)


def _zp(P, s, which, kind):
    t = P.theta if which == "theta" else P.psi
    return zeta_pair(s, t, kind, P.ctx)


def _tail(P, outer, a, inner, b, s, budget):
    return cohen_tail_series(outer, a, inner, b, s, P.x, budget, P.ctx)


def _ints():
    return Progression.integers()


def _pair(P, name, sign):
    return Progression.shifted_pair(P.theta if name == "theta" else P.psi, sign)


def _k_odd_rhs(P, budget):
    mp, nu, x, N = P.mp, P.nu, P.x, P.int("N")
    ctx = P.ctx
    sn, cn = _cs(P)
    total = riemann_zeta(nu + 1, ctx) * _zp(P, 1, "theta", DIFF) * x ** nu / cn
    total -= mp.pi / (2 * sn) * _zp(P, 1 - nu, "theta", DIFF)
    total += _zp(P, -nu, "theta", DIFF) / (2 * x * cn)
    for j in range(1, N + 1):
        total -= riemann_zeta(2 * j, ctx) * _zp(P, 2 * j - nu, "theta", DIFF) * x ** (2 * j - 1) / cn
    T = _tail(P, _ints(), -nu - 1, _pair(P, "theta", -1), -1, nu + 1 - 2 * N, budget)
    return _scaled(T, -x ** (2 * N + 1) / cn, total)


def _k_odd2_rhs(P, budget):
    mp, nu, x, N = P.mp, P.nu, P.x, P.int("N")
    ctx = P.ctx
    sn, cn = _cs(P)
    total = 2 / (2 * mp.pi) ** nu * gamma(nu, ctx) * riemann_zeta(nu, ctx) * _zp(P, 1, "theta", DIFF)
    total += mp.pi / (2 * sn) * x ** nu * _zp(P, 1 + nu, "theta", DIFF)
    total += x ** (nu - 1) / (2 * cn) * _zp(P, nu, "theta", DIFF)
    for j in range(1, N):
        total += riemann_zeta(2 * j + 1 - nu, ctx) * _zp(P, 2 * j + 1, "theta", DIFF) * x ** (2 * j) / cn
    T = _tail(P, _ints(), 0, _pair(P, "theta", -1), -nu, nu + 1 - 2 * N, budget)
    return _scaled(T, x ** (2 * N) / cn, total)


def _k_even_rhs(P, budget):
    mp, nu, x, N = P.mp, P.nu, P.x, P.int("N")
    ctx = P.ctx
    sn, cn = _cs(P)
    total = -mp.pi * riemann_zeta(nu + 1, ctx) * x ** nu / cn
    total -= mp.pi / (2 * cn) * _zp(P, 1 - nu, "theta", SUM)
    total -= _zp(P, -nu, "theta", SUM) / (2 * x * sn)
    for j in range(1, N + 1):
        total += riemann_zeta(2 * j, ctx) * _zp(P, 2 * j - nu, "theta", SUM) * x ** (2 * j - 1) / sn
    # the tail adds the theta and 1-theta terms; printed_tail_sign selects the difference
    flag = P.raw.get("printed_tail_sign", budget.options.get("printed_tail_sign"))
    sign = -1 if flag in (True, "true", "1", 1) else 1
    T = _tail(P, _ints(), -nu, _pair(P, "theta", sign), 0, nu - 2 * N, budget)
    return _scaled(T, x ** (2 * N + 1) / sn, total)


def _k_even2_rhs(P, budget):
    mp, nu, x, N = P.mp, P.nu, P.x, P.int("N")
    ctx = P.ctx
    sn, cn = _cs(P)
    total = -gamma(nu, ctx) * riemann_zeta(nu, ctx) / (2 * mp.pi) ** (nu - 1)
    total += x ** (nu - 1) / (2 * sn) * _zp(P, nu, "theta", SUM)
    total -= mp.pi * x ** nu / (2 * cn) * _zp(P, 1 + nu, "theta", SUM)
    for j in range(1, N + 1):
        total += riemann_zeta(2 * j - nu, ctx) * x ** (2 * j - 1) * _zp(P, 2 * j, "theta", SUM) / sn
    T = _tail(P, _ints(), 0, _pair(P, "theta", 1), -nu, nu - 2 * N, budget)
    return _scaled(T, x ** (2 * N + 1) / sn, total)


def _k_ss_rhs(P, budget):
    mp, nu, x, N = P.mp, P.nu, P.x, P.int("N")
    sn, cn = _cs(P)
    total = _zp(P, 1 - nu, "theta", DIFF) * _zp(P, 1, "psi", DIFF) / (2 * sn)
    total -= x ** nu * _zp(P, 1, "theta", DIFF) * _zp(P, nu + 1, "psi", DIFF) / (2 * sn)
    for j in range(1, N):
        total += x ** (2 * j) * _zp(P, 2 * j + 1 - nu, "theta", DIFF) * _zp(P, 2 * j + 1, "psi", DIFF) / (2 * sn)
    T = _tail(P, _pair(P, "psi", -1), -nu - 1, _pair(P, "theta", -1), -1, nu - 2 * N + 2, budget)
    return _scaled(T, x ** (2 * N) / (2 * sn), total)


def _k_cc_rhs(P, budget):
    mp, nu, x, N = P.mp, P.nu, P.x, P.int("N")
    sn, cn = _cs(P)
    total = -mp.pi * x ** nu / (2 * cn) * _zp(P, 1 + nu, "psi", SUM)
    total -= mp.pi / (2 * cn) * _zp(P, 1 - nu, "theta", SUM)
    for j in range(1, N + 1):
        total += x ** (2 * j - 1) * _zp(P, 2 * j, "psi", SUM) * _zp(P, 2 * j - nu, "theta", SUM) / (2 * sn)
    T = _tail(P, _pair(P, "psi", 1), -nu, _pair(P, "theta", 1), 0, nu - 2 * N, budget)
    return _scaled(T, x ** (2 * N + 1) / (2 * sn), total)


def _k_cs_rhs(P, budget):
    mp, nu, x, N = P.mp, P.nu, P.x, P.int("N")
    sn, cn = _cs(P)
    total = mp.pi / (2 * sn) * x ** nu * _zp(P, 1 + nu, "psi", DIFF)
    total += _zp(P, 1, "psi", DIFF) * _zp(P, 1 - nu, "theta", SUM) / (2 * cn)
    for j in range(1, N):
        total += x ** (2 * j) * _zp(P, 2 * j + 1, "psi", DIFF) * _zp(P, 2 * j + 1 - nu, "theta", SUM) / (2 * cn)
    T = _tail(P, _pair(P, "psi", -1), -nu, _pair(P, "theta", 1), 0, nu - 2 * N + 1, budget)
    return _scaled(T, x ** (2 * N) / (2 * cn), total)


def _k_sc_rhs(P, budget):
    mp, nu, x, N = P.mp, P.nu, P.x, P.int("N")
    sn, cn = _cs(P)
    total = -mp.pi / (2 * sn) * _zp(P, 1 - nu, "theta", DIFF)
    total += x ** nu / (2 * cn) * _zp(P, 1, "theta", DIFF) * _zp(P, 1 + nu, "psi", SUM)
    for j in range(1, N + 1):
        total -= x ** (2 * j - 1) * _zp(P, 2 * j - nu, "theta", DIFF) * _zp(P, 2 * j, "psi", SUM) / (2 * cn)
    T = _tail(P, _pair(P, "psi", 1), -nu - 1, _pair(P, "theta", -1), -1, nu - 2 * N + 1, budget)
    return _scaled(T, -x ** (2 * N + 1) / (2 * cn), total)


def _o_cohen_rhs(P, budget):
    mp, nu, x, N = P.mp, P.nu, P.x, P.int("N")
    ctx = P.ctx
    sn, cn = _cs(P)
    total = -gamma(nu, ctx) * riemann_zeta(nu, ctx) / (2 * mp.pi) ** (nu - 1)
    total += gamma(1 + nu, ctx) * riemann_zeta(1 + nu, ctx) / (mp.pi ** (nu + 1) * mp.mpf(2) ** nu * x)
    total += riemann_zeta(nu, ctx) * x ** (nu - 1) / sn
    for j in range(1, N + 1):
        total += 2 / sn * riemann_zeta(2 * j, ctx) * riemann_zeta(2 * j - nu, ctx) * x ** (2 * j - 1)
    total -= mp.pi * riemann_zeta(nu + 1, ctx) * x ** nu / cn
    T = _tail(P, _ints(), -nu, _ints(), 0, nu - 2 * N, budget)
    return _scaled(T, 2 / sn * x ** (2 * N + 1), total)


def _k_odd_chi_rhs(P, budget):
    mp, nu, x, N = P.mp, P.nu, P.x, P.int("N")
    ctx = P.ctx
    sn, cn = _cs(P)
    chi = P.character(parity="odd")
    q = chi.modulus
    cb = chi.conjugate()
    qx = q * x
    total = -gamma(nu, ctx) * dirichlet_L(nu, chi, ctx) / (2 * mp.pi) ** (nu - 1)
    total += 2 * gamma(1 + nu, ctx) * dirichlet_L(1 + nu, chi, ctx) / (2 * mp.pi) ** (nu + 1) / x
    inner = 2 * riemann_zeta(nu + 1, ctx) * dirichlet_L(1, cb, ctx) * qx ** nu / cn
    for j in range(1, N + 1):
        inner -= 2 / cn * riemann_zeta(2 * j, ctx) * dirichlet_L(2 * j - nu, cb, ctx) * qx ** (2 * j - 1)
    # sum_n bar-sigma_{-nu,bar chi}(n) (n^s - (qx)^s)/(n (n^2 - (qx)^2)), n = d r, weight d^-nu bar-chi(r)
    T = cohen_tail_series(_ints(), -nu - 1, Progression.character(cb, with_guard(ctx, 10)), -1,
                          nu + 1 - 2 * N, qx, budget, ctx)
    pre = mp.mpc(0, 1) * mp.mpf(q) ** (1 - nu) / gauss_sum(chi, ctx)
    inner_est = _scaled(T, -2 / cn * qx ** (2 * N + 1), inner)
    return _scaled(inner_est, pre, total)


def _cohen_check(offsets):
    def check(P, budget):
        trig = tuple(n for n in ("theta", "psi") if n in offsets)
        _check_cohen(P, trig)
        ou, ov = offsets_for(P, offsets)
        _check_pole_set(P, ou, ov, budget)
    return check


def offsets_for(P, names):
    """Grid offsets (u-side, v-side) whose products form the excluded set for x."""
    th = P.frac("theta") if "theta" in names else None
    ps = P.frac("psi") if "psi" in names else None
    one = [Fraction(1)]
    u = [ps, 1 - ps] if ps is not None else one
    v = [th, 1 - th] if th is not None else one
    return u, v


def _k_odd_chi_check(P, budget):
    _check_cohen(P, ())
    chi = P.character(parity="odd")
    qx = chi.modulus * P.frac("x")
    if not budget.options.get("allow_pole_set"):
        _require(abs(qx - round(qx)) >= Fraction(1, 10**4) * qx, "x in pole set")


_COHEN = ("nu", "x", "N")
_register("K_ODD", Section.COHEN, "d^-nu sin(2 pi d theta)", _COHEN + ("theta",), _cohen_check(("theta",)),
          _cohen_lhs_weight(lambda P: _trig_weight(P, WeightKind.TRIG_SIN_D, -P.frac("nu"))), _k_odd_rhs)
_register("K_ODD_CHI", Section.COHEN, "sigma_{-nu,chi}, chi odd primitive", _COHEN + ("q",), _k_odd_chi_check,
          _cohen_lhs_weight(lambda P: DivisorWeight(WeightKind.SIGMA_CHI, z=-P.frac("nu"),
                                                    chi=P.character(parity="odd"))), _k_odd_chi_rhs)
_register("K_ODD2", Section.COHEN, "d^-nu sin(2 pi n theta/d)", _COHEN + ("theta",), _cohen_check(("theta",)),
          _cohen_lhs_weight(lambda P: _trig_weight(P, WeightKind.TRIG_SIN_N_OVER_D, -P.frac("nu"))), _k_odd2_rhs)
_register("K_EVEN", Section.COHEN, "d^-nu cos(2 pi d theta)", _COHEN + ("theta",), _cohen_check(("theta",)),
          _cohen_lhs_weight(lambda P: _trig_weight(P, WeightKind.TRIG_COS_D, -P.frac("nu"))), _k_even_rhs)
_register("K_EVEN2", Section.COHEN, "d^-nu cos(2 pi n theta/d)", _COHEN + ("theta",), _cohen_check(("theta",)),
          _cohen_lhs_weight(lambda P: _trig_weight(P, WeightKind.TRIG_COS_N_OVER_D, -P.frac("nu"))), _k_even2_rhs)
for _id, _combo, _rhs in (("K_SS", _SS, _k_ss_rhs), ("K_CC", _CC, _k_cc_rhs),
                          ("K_CS", _CS, _k_cs_rhs), ("K_SC", _SC, _k_sc_rhs)):
    _register(_id, Section.COHEN, f"d^-nu {_combo[0][0]}(2 pi d theta) {_combo[1][0]}(2 pi n psi/d)",
              _COHEN + ("theta", "psi"), _cohen_check(("theta", "psi")),
              _cohen_lhs_weight(lambda P, c=_combo: _product_weight(P, c, -P.frac("nu"))), _rhs)
_register("O_COHEN", Section.ORACLE, "sigma_{-nu}(n) Cohen identity", _COHEN,
          lambda P, b: (_check_cohen(P, ()), _check_pole_set(P, [Fraction(1)], [Fraction(1)], b)),
          _cohen_lhs_weight(lambda P: DivisorWeight(WeightKind.PLAIN_SIGMA, z=-P.frac("nu"))), _o_cohen_rhs)


# --------------------------------------------------------------------------
# running


def default_context(digits: int | None = None) -> PrecisionContext:
    import os

    if digits is None:
        env = os.environ.get("ZETABESSEL_DIGITS")
        digits = int(env) if env else 60
    return PrecisionContext(digits)


def validate(case: IdentityCase, budget: EvaluationBudget | None = None, ctx: PrecisionContext | None = None):
    ctx = ctx or default_context()
    budget = budget or EvaluationBudget()
    get_theorem(case.id).validate(case.params, ctx, budget)


def evaluate_lhs(case: IdentityCase, budget: EvaluationBudget | None = None,
                 ctx: PrecisionContext | None = None) -> tuple:
    ctx = ctx or default_context()
    budget = budget or EvaluationBudget()
    th = get_theorem(case.id)
    th.validate(case.params, ctx, budget)
    est = th.lhs(Params(case.params, ctx), budget)
    return est.value, est


def evaluate_rhs(case: IdentityCase, budget: EvaluationBudget | None = None,
                 ctx: PrecisionContext | None = None) -> tuple:
    ctx = ctx or default_context()
    budget = budget or EvaluationBudget()
    th = get_theorem(case.id)
    th.validate(case.params, ctx, budget)
    est = th.rhs(Params(case.params, ctx), budget)
    return est.value, est


def _tolerance(th: Theorem, budget: EvaluationBudget | None):
    if budget is not None and "target_tolerance" in budget.options.get("explicit", ()):
        return budget.target_tolerance
    if budget is not None and budget.target_tolerance != EvaluationBudget().target_tolerance:
        return budget.target_tolerance
    return th.tolerance or DEFAULT_TOLERANCE[th.section]


def judge(lhs, rhs, lhs_bound, rhs_bound, tol, mp):
    """(abs_residual, rel_residual, passed) under the shared pass rule."""
    diff = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    rel = diff / scale if scale > 0 else mp.mpf(0)
    bounds = lhs_bound + rhs_bound
    tol = mp.mpf(tol)
    if scale < 10 * bounds or scale == 0:
        passed = diff <= tol
    else:
        passed = rel <= tol and bounds <= tol * scale
    return diff, rel, bool(passed)


def verify(case: IdentityCase, budget: EvaluationBudget | None = None,
           ctx: PrecisionContext | None = None) -> VerificationReport:
    """Evaluate both sides and report the residual.

    Hypothesis violations raise ``HypothesisError``; numerical failures
    (non-convergence and the like) are recorded in the report.
    """
    ctx = ctx or default_context()
    budget = budget or EvaluationBudget()
    th = get_theorem(case.id)
    th.validate(case.params, ctx, budget)
    tol = _tolerance(th, budget)
    start = time.perf_counter()
    P = Params(case.params, ctx)
    try:
        L = th.lhs(P, budget)
        R = th.rhs(P, budget)
    except (ConvergenceError, PoleProximityError, ZetaBesselError, ArithmeticError) as exc:
        if isinstance(exc, HypothesisError):
            raise
        ms = int((time.perf_counter() - start) * 1000)
        return VerificationReport(case, None, None, None, None, {}, {}, False, ms, str(tol),
                                  error=f"{type(exc).__name__}: {exc}")
    mp = ctx.mp
    diff, rel, passed = judge(L.value, R.value, L.bound, R.bound, tol, mp)
    ms = int((time.perf_counter() - start) * 1000)
    return VerificationReport(case, L.value, R.value, diff, rel, L.summary(), R.summary(), passed, ms, str(tol))


# --------------------------------------------------------------------------
# character averaging


_AVERAGE_FAMILIES = {
    # base id -> (target id, character parity, parameter rename)
    "T_M1": ("T_ODD1", "odd"),
    "T_M2": ("T_ODD2", "odd"),
    "T_EVEN1_CHI": ("T_EVEN1", "even"),
    "T_CHI12_SAME": ("T_SINSIN", "odd"),
    "V_CHI_ODD": ("V_SIN_D", "odd"),
}


def _is_prime(n):
    return n > 1 and all(n % p for p in range(2, math.isqrt(n) + 1))


def character_average(base: str, q: int, h: int, side: str, params: dict,
                      budget: EvaluationBudget | None = None, ctx: PrecisionContext | None = None,
                      p: int | None = None, h2: int | None = None):
    """Combine a character theorem over all characters of one parity mod q.

    For the sine families the result is
    (1/(i phi(q))) sum_{chi odd} chi(h) tau(conj chi) * side(base, chi),
    which equals the trigonometric theorem's side at theta = h/q.  The
    cosine family also needs the principal character and the multiples of
    q, which are supplied by the sigma_k oracle at x and q x.  For the
    two-character family the first modulus is ``p`` with residue ``h`` and
    the second is ``q`` with residue ``h2``.
    """
    ctx = ctx or default_context()
    budget = budget or EvaluationBudget()
    if base not in _AVERAGE_FAMILIES:
        raise HypothesisError(f"no averaging rule for {base}")
    if side not in ("lhs", "rhs"):
        raise HypothesisError("side must be 'lhs' or 'rhs'")
    _target, parity = _AVERAGE_FAMILIES[base]
    mp = ctx.mp
    evaluate = evaluate_lhs if side == "lhs" else evaluate_rhs

    def chars(mod):
        # non-coprime residues must drop out: true for primes, and for 4 in the sine case
        _require(_is_prime(mod) or (mod == 4 and parity == "odd"), "q must be prime (or 4 for odd families)")
        group = enumerate_characters(mod)
        pool = [c for c in (group.odd() if parity == "odd" else group.even()) if not c.is_principal]
        return group, pool

    def coef(chi, hh, group):
        c = chi(hh, ctx) * gauss_sum(chi.conjugate(), ctx) / group.phi
        return c / mp.mpc(0, 1) if parity == "odd" else c

    if base == "T_CHI12_SAME":
        _require(p is not None and h2 is not None, "two-character averaging needs p and h2")
        _require(0 < h < p and 0 < h2 < q, "need 0 < h < p and 0 < h2 < q")
        g1, pool1 = chars(p)
        g2, pool2 = chars(q)
        total = mp.mpc(0)
        for i1, c1 in enumerate(pool1):
            for i2, c2 in enumerate(pool2):
                prm = dict(params, p=p, q=q, chi1=str(list(c1.label)), chi2=str(list(c2.label)), parity="odd")
                val, _ = evaluate(IdentityCase(base, prm), budget, ctx)
                total += coef(c1, h, g1) * coef(c2, h2, g2) * val
        return total
    _require(0 < h < q, "need 0 < h < q")
    group, pool = chars(q)
    if not pool:
        raise HypothesisError(f"no non-principal {parity} characters mod {q}")
    total = mp.mpc(0)
    for chi in pool:
        prm = dict(params, q=q, chi=str(list(chi.label)))
        val, _ = evaluate(IdentityCase(base, prm), budget, ctx)
        if base == "V_CHI_ODD":
            # undo the q^(1+nu/2)/tau(chi) normalisation of the Voronoi form
            val *= gauss_sum(chi, ctx) / mp.mpf(q) ** (1 + ctx.num(Fraction(str(params["nu"]))) / 2)
        total += coef(chi, h, group) * val
    if base == "T_EVEN1_CHI":
        # principal character and q | d terms: (1/phi)(S(q x) - S(x)) with S the sigma_k oracle side
        x = Fraction(str(params["x"]))
        base_prm = {k: v for k, v in params.items() if k in ("k", "nu", "a")}
        s_x, _ = evaluate(IdentityCase("O_SIGMA_K", dict(base_prm, x=str(x))), budget, ctx)
        s_qx, _ = evaluate(IdentityCase("O_SIGMA_K", dict(base_prm, x=str(q * x))), budget, ctx)
        total += (s_qx - s_x) / group.phi
    return total
