"""Scalar Dunkl primitives.

The building blocks are the parity indicator ``theta``, the generalized
factorial sequence ``gamma_mu`` defined by

    gamma_mu(0) = 1,    gamma_mu(i+1) = (i+1 + 2*mu*theta(i+1)) * gamma_mu(i),

and the generalized exponential

    e_mu(x) = sum_i x**i / gamma_mu(i),

which reduces to exp(x) at mu = 0.  The factorial-like growth of gamma_mu
rules out evaluating it through gamma-function quotients at runtime (they
overflow near index 170); everything here runs on the recursion, and series
terms are generated by the ratio recurrence

    term(i+1) = term(i) * x / (i+1 + 2*mu*theta(i+1)),

which never materializes gamma_mu itself.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

from .errors import DomainError, RangeError

# Terms of e_mu decay superexponentially once the index passes |x|; this cap
# is far beyond any stopping point reachable within double range.
_MAX_EXP_TERMS = 20_000


def theta(i: int) -> int:
    """Parity indicator: 0 for even i, 1 for odd i."""
    if i < 0:
        raise DomainError(f"parity index must be nonnegative, got {i}")
    return i & 1


class DunklContext:
    """The parameter mu together with a growable cache of gamma_mu values.

    mu must satisfy mu > -1/2 for the recursion factors to stay positive.
    Negative mu (in (-1/2, 0)) is accepted for the scalar primitives and
    flagged via ``negative_mu``; operator construction elsewhere requires
    mu >= 0.

    Cache extension is lock-protected, so contexts may be shared between
    threads; all reads of already-cached entries are plain list indexing.
    """

    __slots__ = ("mu", "_gamma", "_lock")

    def __init__(self, mu: float):
        mu = float(mu)
        if not math.isfinite(mu) or mu <= -0.5:
            raise DomainError(f"mu must be a finite real > -1/2, got {mu}")
        self.mu = mu
        self._gamma = [1.0]
        self._lock = threading.Lock()

    @property
    def negative_mu(self) -> bool:
        """True when mu < 0: scalar primitives only, no operator use."""
        return self.mu < 0.0

    def gamma(self, i: int) -> float:
        """gamma_mu(i) via the product recursion, cached."""
        if i < 0:
            raise DomainError(f"gamma index must be nonnegative, got {i}")
        g = self._gamma
        if i < len(g):
            return g[i]
        with self._lock:
            g = self._gamma
            while len(g) <= i:
                k = len(g)  # next index to fill
                nxt = (k + 2.0 * self.mu * (k & 1)) * g[-1]
                if not math.isfinite(nxt):
                    raise RangeError(
                        f"gamma_mu({k}) exceeds double range (mu={self.mu}); "
                        f"indices up to {len(g) - 1} are representable"
                    )
                g.append(nxt)
        return g[i]

    def __repr__(self):
        return f"DunklContext(mu={self.mu!r})"


def gamma_mu(ctx: DunklContext, i: int) -> float:
    """gamma_mu(i) for the context's mu; strictly positive and finite."""
    return ctx.gamma(i)


@dataclass(frozen=True)
class ExpEvaluation:
    """Result of a truncated e_mu evaluation.

    tail_bound is a geometric estimate of the absolute truncation error,
    valid because past the stopping index the term ratio |x|/(i+1+2*mu*theta)
    is below one and shrinking.
    """

    value: float
    terms_used: int
    tail_bound: float


def _sum_series(mu: float, x: float, tol: float) -> ExpEvaluation:
    """Sum the e_mu series at x with Neumaier-compensated accumulation.

    Stops once |term| < tol * |partial sum| holds for 3 consecutive terms
    with index past |x|: before that index the terms may still be growing,
    so a single small-term test would truncate prematurely for large |x|.
    """
    term = 1.0
    total = 1.0
    comp = 0.0  # Neumaier compensation
    small_streak = 0
    abs_x = abs(x)
    i = 0
    while i < _MAX_EXP_TERMS:
        i += 1
        term = term * x / (i + 2.0 * mu * (i & 1))
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        if not math.isfinite(total):
            raise RangeError(f"e_mu({x}) overflows double range at term {i}")
        if i > abs_x and abs(term) < tol * abs(total + comp):
            small_streak += 1
            if small_streak >= 3:
                break
        else:
            small_streak = 0
    else:
        raise RangeError(f"e_mu series did not settle within {_MAX_EXP_TERMS} terms")
    value = total + comp
    # Subsequent denominators are at least i+1 (mu >= 0) or i (mu < 0).
    ratio = abs_x / (i + 1.0 + 2.0 * min(mu, 0.0))
    tail = abs(term) * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
    return ExpEvaluation(value=value, terms_used=i + 1, tail_bound=tail)


def dunkl_exp(ctx: DunklContext, x: float, tol: float = 1e-15) -> ExpEvaluation:
    """Evaluate e_mu(x) by truncated series summation.

    For mu = 0 and x < 0 the series is exp(x) and is evaluated as the
    reciprocal of the positive-argument sum: the alternating sum loses
    relative accuracy to cancellation (absolute error on the order of
    machine epsilon times exp(|x|)), while the reciprocal stays correct to
    a few ulps.  No such identity exists for mu != 0, where the alternating
    sum is used and the same absolute-error behavior applies; the quantity
    the moment formulas consume is the ratio e_mu(-y)/e_mu(y), whose
    absolute error stays at machine-epsilon level either way.
    """
    if not math.isfinite(x):
        raise DomainError(f"e_mu argument must be finite, got {x}")
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if x == 0.0:
        return ExpEvaluation(value=1.0, terms_used=1, tail_bound=0.0)
    if ctx.mu == 0.0 and x < 0.0:
        pos = _sum_series(0.0, -x, tol)
        value = 1.0 / pos.value
        return ExpEvaluation(
            value=value,
            terms_used=pos.terms_used,
            tail_bound=pos.tail_bound * value * value,
        )
    return _sum_series(ctx.mu, x, tol)


def dunkl_exp_neg_ratio(ctx: DunklContext, y: float, tol: float = 1e-15) -> float:
    """The ratio e_mu(-y)/e_mu(y) for y >= 0.

    Computed as the quotient of two series evaluations; the result lies in
    [-1, 1] up to rounding because the numerator's terms are dominated in
    absolute value by the denominator's.  Carries absolute error of order
    machine epsilon for large y (cancellation in the numerator), which is
    the accuracy the moment formulas require of it.
    """
    if y < 0.0:
        raise DomainError(f"ratio argument must be nonnegative, got {y}")
    if y == 0.0:
        return 1.0
    num = dunkl_exp(ctx, -y, tol)
    den = dunkl_exp(ctx, y, tol)
    return num.value / den.value
