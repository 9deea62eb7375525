"""Precision contexts, compensated summation and evaluation budgets.

Every evaluator in the package receives a :class:`PrecisionContext`.  The
context owns a private mpmath ``MPContext`` so no code path depends on the
process-wide ``mpmath.mp`` precision.  Values produced through ``ctx.mp`` are
ordinary mpmath numbers, immutable and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable

import mpmath

DEFAULT_DIGITS = 60
DEFAULT_GUARD = 20


@lru_cache(maxsize=None)
def _backend(dps: int) -> mpmath.ctx_mp.MPContext:
    # One backend per decimal precision; never mutated after creation.
    mp = mpmath.MPContext()
    mp.dps = dps
    return mp


@dataclass(frozen=True)
class PrecisionContext:
    """Decimal working precision plus guard digits for cancellation-prone paths."""

    digits: int = DEFAULT_DIGITS
    guard_digits: int = DEFAULT_GUARD

    def __post_init__(self) -> None:
        if int(self.digits) != self.digits or self.digits < 15:
            raise ValueError("digits must be an integer >= 15")
        if int(self.guard_digits) != self.guard_digits or self.guard_digits < 0:
            raise ValueError("guard_digits must be a non-negative integer")

    @property
    def mp(self) -> mpmath.ctx_mp.MPContext:
        """Arithmetic backend running at ``digits`` decimal digits."""
        return _backend(self.digits)

    @property
    def eps(self):
        return self.mp.mpf(10) ** (-self.digits)

    def guarded(self) -> "PrecisionContext":
        """Context with the guard digits folded into the working precision."""
        return with_guard(self, self.guard_digits)

    def num(self, value):
        """Convert ``value`` (int, str, Fraction, float, mpf) to a real at this precision."""
        from fractions import Fraction

        if isinstance(value, Fraction):
            return self.mp.mpf(value.numerator) / value.denominator
        return self.mp.mpf(value)

    def cnum(self, value):
        return self.mp.mpc(value)


def with_guard(ctx: PrecisionContext, extra: int) -> PrecisionContext:
    """Return a copy of ``ctx`` whose working precision is ``extra`` digits higher."""
    if extra < 0:
        raise ValueError("extra must be non-negative")
    return replace(ctx, digits=ctx.digits + int(extra))


def compensated_sum(terms: Iterable, ctx: PrecisionContext | None = None):
    """Neumaier-compensated sum of real or complex high-precision terms.

    Exact cancellations such as ``[1, -1, 1e-30]`` leave the small term intact
    because the running error term is carried separately.
    """
    ctx = ctx or PrecisionContext()
    mp = ctx.mp
    total = mp.mpf(0)
    comp = mp.mpf(0)
    for t in terms:
        t = mp.convert(t)
        s = total + t
        if abs(total) >= abs(t):
            comp += (total - s) + t
        else:
            comp += (t - s) + total
        total = s
    return total + comp


@dataclass(frozen=True)
class EvaluationBudget:
    """Truncation limits and tolerances for one series evaluation.

    Tolerances are stored as decimal strings so that the budget itself carries
    no binary rounding; evaluators convert them in their own context.
    """

    max_terms_outer: int = 200_000
    max_terms_inner: int = 200_000
    tail_epsilon: str = "1e-30"
    singularity_threshold: str = "1e-6"
    target_tolerance: str = "1e-8"
    options: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.max_terms_outer < 1 or self.max_terms_inner < 1:
            raise ValueError("term limits must be positive")
        if not float(self.tail_epsilon) > 0:
            raise ValueError("tail_epsilon must be positive")
        thr = float(self.singularity_threshold)
        if not 0 < thr <= 0.01:
            raise ValueError("singularity_threshold must lie in (0, 0.01]")
        if not float(self.target_tolerance) > 0:
            raise ValueError("target_tolerance must be positive")

    def tail_eps(self, ctx: PrecisionContext):
        return ctx.mp.mpf(self.tail_epsilon)

    def tolerance(self, ctx: PrecisionContext):
        return ctx.mp.mpf(self.target_tolerance)

    def threshold(self, ctx: PrecisionContext):
        return ctx.mp.mpf(self.singularity_threshold)
