"""Operator evaluation and closed-form moments.

The operator attached to a family F at scale n averages a function over the
nodes (i + 2*mu*theta(i))/n with the family's weights.  Its first and second
raw moments, and the central moments omega1 and omega2, also have closed
forms assembled from ten scalar functionals of the generating series Q
(values and ordinary/Dunkl derivatives at +-1) plus the exponential ratio
e_mu(-nx)/e_mu(nx).  Both routes are implemented; they serve as mutual
oracles, and the two algebraically identical expressions for omega2 are
checked against each other on every call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .appell import AppellFamily
from .dunkl import dunkl_exp_neg_ratio
from .errors import DomainError, EvaluationError, TranscriptionError

# Past this argument the ratio e_mu(-y)/e_mu(y) is below 1e-300 for every
# mu >= 0 (it decays like exp(-2y) up to polynomial factors), and the series
# for e_mu(y) would overflow; flush to zero instead of evaluating.
_RATIO_FLUSH_ARG = 650.0


@dataclass(frozen=True)
class OperatorSpec:
    """A family plus the scale n and the weight-truncation policy."""

    family: AppellFamily
    n: int
    tol: float = 1e-12
    cap: int = 10_000

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"operator scale n must be >= 1, got {self.n}")
        if self.tol <= 0.0:
            raise DomainError(f"tolerance must be positive, got {self.tol}")


@dataclass(frozen=True)
class QFunctionals:
    """The ten scalar functionals of Q the moment formulas consume.

    q1    = Q(1)            qm1  = Q(-1)
    dq1   = Q'(1)           dqm1 = Q'(-1)
    ddq1  = Q''(1)
    lq1   = (LQ)(1)         lqm1 = (LQ)(-1)      with L the Dunkl operator
    dlq1  = (LQ)'(1)        ldq1 = (LQ')(1)
    llq1  = (LLQ)(1)
    """

    q1: float
    qm1: float
    dq1: float
    dqm1: float
    ddq1: float
    lq1: float
    lqm1: float
    dlq1: float
    ldq1: float
    llq1: float


@dataclass(frozen=True)
class CentralMoments:
    """First and second central moments at one (n, x), with provenance."""

    omega1: float
    omega2: float
    source: str  # 'closed-form' or 'series-summed'


def exp_ratio(spec: OperatorSpec, x: float) -> float:
    """e_mu(-nx)/e_mu(nx) with underflow flushed to zero.

    The moment formulas multiply this ratio into order-one quantities, so
    anything below 1e-300 is indistinguishable from zero there.
    """
    y = spec.n * x
    if y >= _RATIO_FLUSH_ARG:
        return 0.0
    rho = dunkl_exp_neg_ratio(spec.family.ctx, y, tol=min(1e-15, spec.tol))
    if abs(rho) < 1e-300:
        return 0.0
    return rho


def nodes(spec: OperatorSpec, count: int):
    """The first ``count`` evaluation nodes (i + 2*mu*theta(i))/n."""
    mu = spec.family.ctx.mu
    n = spec.n
    return [(i + 2.0 * mu * (i & 1)) / n for i in range(count)]


def apply(spec: OperatorSpec, f: Callable[[float], float], x: float) -> float:
    """Evaluate the operator on f at x by weighted summation.

    The weight emission's mass tolerance only bounds the zeroth-moment
    truncation error; for growing targets like t or t**2 the omitted tail
    picks up a factor of the node value at the cutoff.  The mass tolerance
    is therefore derated by the square of an a-priori estimate of that
    node, floored where cumulative-mass rounding noise would start to bite.
    """
    n = spec.n
    node_cut = x + (8.0 * math.sqrt(n * x + 1.0) + 40.0) / n
    tol = max(spec.tol / (1.0 + node_cut * node_cut), 5e-14)
    tol = min(tol, spec.tol)
    ws = spec.family.weights(spec.n, x, tol=tol, cap=spec.cap)
    total = 0.0
    for i, w in enumerate(ws.weights):
        if w == 0.0:
            continue
        node = (i + 2.0 * spec.family.ctx.mu * (i & 1)) / spec.n
        fv = f(node)
        if not math.isfinite(fv):
            raise EvaluationError(
                f"target function returned non-finite value {fv} at node {node}"
            )
        total += w * fv
    return total


def q_functionals(family: AppellFamily) -> QFunctionals:
    """All ten Q-functionals, composed from generic series transforms.

    No per-family hand formulas: one code path serves every generator, and
    hand-derived specializations live only in tests.
    """
    Q = family.Q
    dQ = Q.derivative()
    lQ = Q.dunkl_derivative()
    return QFunctionals(
        q1=family.Q_at_1,
        qm1=Q.eval(-1.0),
        dq1=dQ.eval(1.0),
        dqm1=dQ.eval(-1.0),
        ddq1=dQ.derivative().eval(1.0),
        lq1=lQ.eval(1.0),
        lqm1=lQ.eval(-1.0),
        dlq1=lQ.derivative().eval(1.0),
        ldq1=dQ.dunkl_derivative().eval(1.0),
        llq1=lQ.dunkl_derivative().eval(1.0),
    )


def moments_closed(spec: OperatorSpec, x: float):
    """Closed-form raw moments (m0, m1, m2) of the operator at x.

    m0 is one by construction.  The remaining formulas are written in terms
    of rho = e_mu(-nx)/e_mu(nx), so only well-conditioned ratios of the
    exponentials ever appear.
    """
    if x < 0.0:
        raise DomainError(f"evaluation point must be >= 0, got {x}")
    F = q_functionals(spec.family)
    n = spec.n
    mu = spec.family.ctx.mu
    rho = exp_ratio(spec, x)
    m1 = x + ((1.0 - rho) * F.dq1 + rho * F.lq1) / (F.q1 * n)
    m2 = (
        x * x
        + ((2.0 * F.dq1 + F.q1) + 2.0 * mu * F.qm1 * rho) * x / (F.q1 * n)
        + F.lq1 * rho / (F.q1 * n * n)
        + (2.0 * F.ddq1 - F.dlq1 - F.ldq1 + F.dq1 - 2.0 * mu * F.dqm1)
        * (1.0 - rho)
        / (F.q1 * n * n)
        + (F.llq1 + 2.0 * mu * F.lqm1) / (F.q1 * n * n)
    )
    return 1.0, m1, m2


def central_moments(spec: OperatorSpec, x: float) -> CentralMoments:
    """Closed-form central moments omega1, omega2 at x.

    omega2 is computed from its own printed formula and recomputed as
    m2 - 2*x*m1 + x**2; the two are algebraically identical, so any
    disagreement beyond rounding indicates a transcription bug and raises.
    """
    if x < 0.0:
        raise DomainError(f"evaluation point must be >= 0, got {x}")
    F = q_functionals(spec.family)
    n = spec.n
    mu = spec.family.ctx.mu
    rho = exp_ratio(spec, x)
    omega1 = ((1.0 - rho) * F.dq1 + rho * F.lq1) / (F.q1 * n)
    omega2 = (
        (1.0 + 2.0 * rho * (mu * F.qm1 + F.dq1 - F.lq1) / F.q1) * x / n
        + F.lq1 * rho / (F.q1 * n * n)
        + (2.0 * F.ddq1 - F.dlq1 - F.ldq1 + F.dq1 - 2.0 * mu * F.dqm1)
        * (1.0 - rho)
        / (F.q1 * n * n)
        + (F.llq1 + 2.0 * mu * F.lqm1) / (F.q1 * n * n)
    )
    _, m1, m2 = moments_closed(spec, x)
    combined = m2 - 2.0 * x * m1 + x * x
    # The combination cancels x**2-sized terms, so allow a rounding floor
    # proportional to the quantities that cancel.
    floor = 64.0 * 2.220446049250313e-16 * (x * x + 2.0 * x * abs(m1) + abs(m2))
    diff = abs(omega2 - combined)
    if diff > 1e-10 * max(abs(omega2), abs(combined)) + floor:
        raise TranscriptionError(
            f"formula transcription error: omega2 printed form {omega2!r} vs "
            f"moment combination {combined!r} at (n={n}, x={x}, mu={mu})"
        )
    if omega2 < 0.0:
        if omega2 < -1e-12:
            raise TranscriptionError(
                f"omega2 = {omega2!r} is materially negative at (n={n}, x={x})"
            )
        omega2 = 0.0
    return CentralMoments(omega1=omega1, omega2=omega2, source="closed-form")


def central_moments_series(spec: OperatorSpec, x: float) -> CentralMoments:
    """Central moments by direct weighted summation (the slow oracle)."""
    omega1 = apply(spec, lambda t: t - x, x)
    omega2 = apply(spec, lambda t: (t - x) ** 2, x)
    if -1e-12 <= omega2 < 0.0:
        omega2 = 0.0
    return CentralMoments(omega1=omega1, omega2=omega2, source="series-summed")
