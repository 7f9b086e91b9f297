"""Endpoint-singular integrals J_{k1,k2,k3} and the centered limit moments m_k.

    J_{k1,k2,k3} = int_0^1 x^(k1 a - 3/2) (1-x)^(k2 a - 3/2) B(x)^k3 dx,   a = alpha + 1/2,

with B(x) = x^a + (1-x)^a - 1, or B(x) = x log x + (1-x) log(1-x) when
alpha = 1/2. Integrals are computed by tanh-sinh quadrature on (0, 1); every
integrand receives both x and 1-x, each accurate to full relative
precision, so nothing cancels at the endpoints.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Optional, Union

import mpmath

from .config import setting
from .errors import ArgumentError, ConvergenceError, PoleError
from .exact_moments import compositions, multinomial
from .numeric import as_fraction, gamma_signed, to_mpf
from .types import CenteredMomentSeq, QuadratureResult, QuadratureSpec

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

Integrand = Callable[[mpmath.mpf, mpmath.mpf], mpmath.mpf]


def default_spec() -> QuadratureSpec:
    return QuadratureSpec(tol=float(setting("integrals.tol")), max_levels=int(setting("integrals.max_levels")))


def de_quadrature(f: Integrand, spec: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """Integrate f(x, 1-x) over (0, 1) with the tanh-sinh rule.

    x = 1 / (1 + exp(-pi sinh t)); level l uses step 2^(1-l) on |t| <= t_max
    and reuses the nodes of level l-1. The error estimate of a level is its
    distance to the previous level.
    """
    spec = spec or default_spec()
    t_max = to_mpf(setting("integrals.t_max"))

    def node(t: mpmath.mpf) -> mpmath.mpf:
        u = mpmath.pi * mpmath.sinh(t)
        x = 1 / (1 + mpmath.exp(-u))
        xc = 1 / (1 + mpmath.exp(u))
        return f(x, xc) * mpmath.pi * mpmath.cosh(t) * x * xc

    h = mpmath.mpf(1)
    steps = int(mpmath.floor(t_max))
    total = mpmath.fsum(node(j * h) for j in range(-steps, steps + 1))
    estimate = h * total
    history = [mpmath.inf]
    for level in range(2, spec.max_levels + 1):
        h /= 2
        steps = int(mpmath.floor(t_max / h))
        # odd multiples of the new step are the nodes this level adds
        total += mpmath.fsum(node(j * h) for j in range(-steps, steps + 1) if j % 2)
        previous, estimate = estimate, h * total
        error = abs(estimate - previous)
        history.append(error)
        logger.debug("tanh-sinh level %d: %s (error %s)", level, mpmath.nstr(estimate, 15), mpmath.nstr(error, 3))
        if error <= spec.tol:
            return QuadratureResult(estimate, error, level, tuple(history))
    raise ConvergenceError(f"quadrature error {mpmath.nstr(history[-1], 3)} above {spec.tol} "
                           f"after {spec.max_levels} levels")


AlphaLike = Union[Fraction, int, float, str]


def _power_bracket(a: mpmath.mpf) -> Integrand:
    def bracket(x: mpmath.mpf, xc: mpmath.mpf) -> mpmath.mpf:
        # x^a + (1-x)^a - 1 with the small variable carrying the expm1
        s = x if x <= xc else xc
        return s ** a + mpmath.expm1(a * mpmath.log1p(-s))
    return bracket


def _log_bracket(x: mpmath.mpf, xc: mpmath.mpf) -> mpmath.mpf:
    if x <= xc:
        return x * mpmath.log(x) + xc * mpmath.log1p(-x)
    return x * mpmath.log1p(-xc) + xc * mpmath.log(xc)


def _check_integrable(k1: int, k2: int, k3: int, a: Fraction, half: bool) -> None:
    order = Fraction(1) if half else min(a, Fraction(1))
    for ki in (k1, k2):
        if ki * a - Fraction(3, 2) + k3 * order <= -1:
            raise ArgumentError(f"J_{{{k1},{k2},{k3}}} diverges at an endpoint for alpha' = {a}")


@lru_cache(maxsize=None)
def _j_cached(k1: int, k2: int, k3: int, alpha: Fraction, tol: float, max_levels: int) -> QuadratureResult:
    half = alpha == HALF
    a = alpha + HALF
    _check_integrable(k1, k2, k3, a, half)
    with mpmath.workprec(int(setting("integrals.prec_bits"))):
        am = to_mpf(a)
        p1, p2 = k1 * am - mpmath.mpf(3) / 2, k2 * am - mpmath.mpf(3) / 2
        bracket = _log_bracket if half else _power_bracket(am)

        def f(x: mpmath.mpf, xc: mpmath.mpf) -> mpmath.mpf:
            v = x ** p1 * xc ** p2
            return v * bracket(x, xc) ** k3 if k3 else v

        result = de_quadrature(f, QuadratureSpec(tol=tol, max_levels=max_levels))
    logger.debug("J_{%d,%d,%d}(alpha=%s) = %s in %d levels", k1, k2, k3, alpha,
                 mpmath.nstr(result.value, 15), result.levels)
    return result


def j_integral_result(k1: int, k2: int, k3: int, alpha: AlphaLike,
                      spec: Optional[QuadratureSpec] = None) -> QuadratureResult:
    if min(k1, k2, k3) < 0:
        raise ArgumentError(f"indices must be nonnegative, got ({k1}, {k2}, {k3})")
    alpha = as_fraction(alpha)
    if alpha <= 0:
        raise ArgumentError(f"alpha must be > 0, got {alpha}")
    spec = spec or default_spec()
    # J is symmetric under x -> 1-x
    lo, hi = min(k1, k2), max(k1, k2)
    return _j_cached(lo, hi, k3, alpha, spec.tol, spec.max_levels)


def j_integral(k1: int, k2: int, k3: int, alpha: AlphaLike, spec: Optional[QuadratureSpec] = None) -> mpmath.mpf:
    """J_{k1,k2,k3} for the given alpha; the logarithmic bracket is used at alpha = 1/2."""
    return j_integral_result(k1, k2, k3, alpha, spec).value


def beta_closed_form(k1: int, k2: int, alpha: AlphaLike) -> mpmath.mpf:
    """J_{k1,k2,0} = Gamma(k1 a - 1/2) Gamma(k2 a - 1/2) / Gamma((k1+k2) a - 1)."""
    if k1 < 1 or k2 < 1:
        raise ArgumentError("closed form needs k1, k2 >= 1")
    a = to_mpf(as_fraction(alpha) + HALF)
    half = mpmath.mpf(1) / 2
    return mpmath.gamma(k1 * a - half) * mpmath.gamma(k2 * a - half) / mpmath.gamma((k1 + k2) * a - 1)


def _recurrence(K: int, a: mpmath.mpf, coef: mpmath.mpf, j: Callable[[int, int, int], mpmath.mpf]) -> list:
    root_pi = mpmath.sqrt(mpmath.pi)
    m = [mpmath.mpf(1), mpmath.mpf(0)]
    for k in range(2, K + 1):
        parts = []
        for k1, k2, k3 in compositions(k):
            if k1 == 1 or k2 == 1:
                continue
            parts.append(multinomial(k, k1, k2, k3) * m[k1] * m[k2] * coef ** k3 * j(k1, k2, k3))
        inner = mpmath.fsum(parts) + 4 * root_pi * k * m[k - 1]
        prefactor = mpmath.gamma(k * a - 1) / (4 * root_pi * mpmath.gamma(k * a - mpmath.mpf(1) / 2))
        m.append(prefactor * inner)
        logger.debug("m_%d = %s", k, mpmath.nstr(m[-1], 15))
    return m[:K + 1]


def _check_order(K: int) -> None:
    if K < 0:
        raise ArgumentError(f"K must be >= 0, got {K}")


def mk_sequence(alpha: AlphaLike, K: int, spec: Optional[QuadratureSpec] = None) -> CenteredMomentSeq:
    """Centered limit moments m_0..m_K for toll n^alpha, alpha != 1/2."""
    _check_order(K)
    alpha = as_fraction(alpha)
    if alpha <= 0:
        raise ArgumentError(f"alpha must be > 0, got {alpha}")
    if alpha == HALF:
        raise PoleError("alpha = 1/2 has its own recurrence; use mk_sequence_half")
    spec = spec or default_spec()
    with mpmath.workprec(int(setting("integrals.prec_bits"))):
        a = to_mpf(alpha + HALF)
        coef = gamma_signed(to_mpf(alpha) - mpmath.mpf(1) / 2) / mpmath.gamma(to_mpf(alpha))
        m = _recurrence(K, a, coef, lambda k1, k2, k3: j_integral(k1, k2, k3, alpha, spec))
    logger.info("m_k for alpha=%s up to K=%d", alpha, K)
    return CenteredMomentSeq(alpha, tuple(m))


def mk_sequence_half(K: int, spec: Optional[QuadratureSpec] = None) -> CenteredMomentSeq:
    """Centered limit moments m_0..m_K for toll n^(1/2), centered by the D_1 profile."""
    _check_order(K)
    spec = spec or default_spec()
    with mpmath.workprec(int(setting("integrals.prec_bits"))):
        coef = 1 / mpmath.sqrt(mpmath.pi)
        m = _recurrence(K, mpmath.mpf(1), coef, lambda k1, k2, k3: j_integral(k1, k2, k3, HALF, spec))
    logger.info("m_k for alpha=1/2 up to K=%d", K)
    return CenteredMomentSeq("half", tuple(m))


def half_j002_closed_form() -> mpmath.mpf:
    """J_{0,0,2} at alpha = 1/2 equals 16 pi log 2 - pi^3."""
    return 16 * mpmath.pi * mpmath.log(2) - mpmath.pi ** 3


def excess_kurtosis(seq: CenteredMomentSeq) -> Any:
    if seq.K < 4:
        raise ArgumentError("excess kurtosis needs m_4")
    return seq.m[4] / seq.m[2] ** 2 - 3