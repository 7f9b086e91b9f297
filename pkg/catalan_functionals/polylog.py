"""Generalized polylogarithms Li_{alpha,r}(z) = sum_n (log n)^r n^(-alpha) z^n.

Singular expansions at z = 1 are stored as :class:`SingularExpansion` values
in terms of (1-z)^e L(z)^m with L(z) = log(1/(1-z)); ``li_eval`` is a direct
summation with a geometric tail bound, used to check those expansions
numerically.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .config import setting
from .errors import ArgumentError, CapError, ConvergenceError, DomainError
from .numeric import as_fraction, to_mpf
from .types import ExpansionTerm, PolylogId, ResidualPoint, ResidualReport, SingularExpansion

logger = logging.getLogger(__name__)

MAX_GAMMA_DERIVATIVE = 6


def _prec() -> int:
    return int(setting("numeric.prec_bits"))


def _epsilon(alpha: Fraction) -> Fraction:
    eps = as_fraction(setting("polylog.epsilon"))
    # keep the remainder above the constant term
    if 0 < alpha <= eps:
        eps = alpha / 2
    return eps


def gamma_derivatives(k: int, x: Any) -> mpmath.mpf:
    """k-th derivative of Gamma at x > 0.

    Differentiating Gamma' = Gamma * psi with Leibniz' rule gives
    Gamma^(k+1) = sum_j C(k, j) psi^(j) Gamma^(k-j).
    """
    if k < 0:
        raise ArgumentError(f"derivative order must be >= 0, got {k}")
    if k > MAX_GAMMA_DERIVATIVE:
        raise CapError(f"derivative order {k} exceeds the cap {MAX_GAMMA_DERIVATIVE}")
    with mpmath.workprec(_prec()):
        x = to_mpf(x)
        if x <= 0:
            raise ArgumentError(f"gamma_derivatives needs x > 0, got {mpmath.nstr(x, 10)}")
        psi = [mpmath.psi(j, x) for j in range(k)]
        d = [mpmath.gamma(x)]
        for m in range(k):
            d.append(mpmath.fsum(math.comb(m, j) * psi[j] * d[m - j] for j in range(m + 1)))
        return d[k]


def _check_alpha(alpha: Fraction) -> None:
    if alpha >= 1:
        raise DomainError(f"singular expansion needs alpha < 1, got {alpha}")


def _zeta_derivative(alpha: Fraction, r: int) -> mpmath.mpf:
    return mpmath.zeta(to_mpf(alpha), 1, r)


def li_expansion(pid: PolylogId) -> SingularExpansion:
    """Li_{alpha,r}(z) = sum_k lambda_k (1-z)^(alpha-1) L^(r-k) + [alpha>0] (-1)^r zeta^(r)(alpha) + O(|1-z|^(alpha-eps))."""
    _check_alpha(pid.alpha)
    with mpmath.workprec(_prec()):
        a = pid.alpha
        terms = [ExpansionTerm(a - 1, pid.r - k, math.comb(pid.r, k) * gamma_derivatives(k, 1 - a))
                 for k in range(pid.r + 1)]
        if a > 0:
            terms.append(ExpansionTerm(Fraction(0), 0, (-1) ** pid.r * _zeta_derivative(a, pid.r)))
    return SingularExpansion(tuple(terms), a - _epsilon(a), has_constant=a > 0)


@lru_cache(maxsize=None)
def _mu(alpha: Fraction, r: int) -> Tuple[mpmath.mpf, ...]:
    # matching powers of L in sum_k mu_k Li_{alpha,r-k}: for s >= 1
    # sum_{k<=s} mu_k C(r-k, s-k) Gamma^(s-k)(1-alpha) = 0
    g = [gamma_derivatives(j, 1 - alpha) for j in range(r + 1)]
    mu = [1 / g[0]]
    for s in range(1, r + 1):
        nu = mpmath.fsum(mu[k] * math.comb(r - k, s - k) * g[s - k] for k in range(s))
        mu.append(-nu / g[0])
    return tuple(mu)


def omz_to_li(alpha: Any, r: int) -> Tuple[Tuple[mpmath.mpf, ...], mpmath.mpf]:
    """(mu_0..mu_r, c_r) with (1-z)^(alpha-1) L^r = sum_k mu_k Li_{alpha,r-k} + c_r + O(|1-z|^(alpha-eps)).

    The constant is only meaningful for alpha > 0 and is returned as 0 otherwise.
    """
    alpha = as_fraction(alpha)
    _check_alpha(alpha)
    if r < 0:
        raise ArgumentError(f"log power r must be >= 0, got {r}")
    with mpmath.workprec(_prec()):
        mu = _mu(alpha, r)
        if alpha > 0:
            c = -mpmath.fsum(mu[k] * (-1) ** (r - k) * _zeta_derivative(alpha, r - k) for k in range(r + 1))
        else:
            c = mpmath.mpf(0)
    return mu, c


def hadamard_li(a: PolylogId, b: PolylogId) -> PolylogId:
    """Li_{a,r} (.) Li_{b,s} = Li_{a+b, r+s}."""
    return PolylogId(a.alpha + b.alpha, a.r + b.r)


def li_negative_refinement(alpha: Any) -> SingularExpansion:
    """Two-term expansion of Li_{alpha,0} for alpha < 0, with the zeta constant when alpha > -1."""
    alpha = as_fraction(alpha)
    if alpha >= 0:
        raise DomainError(f"negative refinement needs alpha < 0, got {alpha}")
    with mpmath.workprec(_prec()):
        g = mpmath.gamma(to_mpf(1 - alpha))
        terms = [ExpansionTerm(alpha - 1, 0, g), ExpansionTerm(alpha, 0, -g * to_mpf(1 - alpha) / 2)]
        if alpha > -1:
            terms.append(ExpansionTerm(Fraction(0), 0, mpmath.zeta(to_mpf(alpha))))
    return SingularExpansion(tuple(terms), alpha + 1 - as_fraction(setting("polylog.epsilon")),
                             has_constant=alpha > -1)


def _ratio_bound(z: float, alpha: float, r: int, n: int) -> float:
    """Upper bound on t_{m+1}/t_m for all m >= n (n >= 2)."""
    q = z * (1 + 1 / n) ** max(-alpha, 0.0)
    if r:
        q *= (math.log(n + 1) / math.log(n)) ** r
    return q


def _li_double(alpha: float, r: int, z: float) -> float:
    chunk = int(setting("polylog.chunk"))
    cap = int(setting("polylog.max_terms_double"))
    log_z = math.log(z)
    sums = []
    start = 1
    while True:
        n = np.arange(start, start + chunk, dtype=np.float64)
        t = np.exp(n * log_z - alpha * np.log(n))
        if r:
            t = t * np.log(n) ** r
        sums.append(float(np.sum(t)))
        last = start + chunk - 1
        total = math.fsum(sums)
        q = _ratio_bound(z, alpha, r, max(last, 2))
        if q < 1:
            nxt = math.exp((last + 1) * log_z - alpha * math.log(last + 1)) * math.log(last + 1) ** r
            tail = nxt / (1 - q)
            if tail <= 1e-16 * max(abs(total), 1e-300):
                logger.debug("li_eval double: %d terms, tail bound %.3g", last, tail)
                return total
        if last >= cap:
            raise ConvergenceError(f"Li_{{{alpha},{r}}}({z}) needs more than {cap} terms")
        start = last + 1


def _li_mp(alpha: mpmath.mpf, r: int, z: mpmath.mpf, prec: int) -> mpmath.mpf:
    cap = int(setting("polylog.max_terms_mp"))
    threshold = mpmath.ldexp(1, -prec)
    parts = []
    zn = mpmath.mpf(1)
    for n in range(1, cap + 1):
        zn *= z
        t = zn * mpmath.mpf(n) ** (-alpha)
        if r:
            t *= mpmath.log(n) ** r
        parts.append(t)
        if n % 256 == 0:
            q = _ratio_bound(float(z), float(alpha), r, n)
            if q < 1:
                total = mpmath.fsum(parts)
                tail = t * q / (1 - q)
                if tail <= threshold * abs(total):
                    logger.debug("li_eval mp: %d terms", n)
                    return total
    raise ConvergenceError(f"Li_{{{mpmath.nstr(alpha, 6)},{r}}}({mpmath.nstr(z, 10)}) needs more than "
                           f"{cap} terms at {prec} bits")


def li_eval(pid: PolylogId, z: Any, precision: int = 53) -> mpmath.mpf:
    """Direct summation of Li_{alpha,r}(z) for 0 < z < 1."""
    if precision < 2:
        raise ArgumentError(f"precision must be >= 2 bits, got {precision}")
    if precision <= 53:
        zf = float(z)
        if not 0 < zf < 1:
            raise ArgumentError(f"li_eval needs 0 < z < 1, got {z}")
        return mpmath.mpf(_li_double(float(pid.alpha), pid.r, zf))
    with mpmath.workprec(precision + 16):
        zm = to_mpf(z)
        if not 0 < zm < 1:
            raise ArgumentError(f"li_eval needs 0 < z < 1, got {z}")
        value = _li_mp(to_mpf(pid.alpha), pid.r, zm, precision)
    with mpmath.workprec(precision):
        return +value


def default_grid(points: int = 6) -> Tuple[Fraction, ...]:
    """1 - 10^-j for j = 1..points."""
    return tuple(1 - Fraction(1, 10 ** j) for j in range(1, points + 1))


def _slope(x: Sequence[float], y: Sequence[float]) -> float:
    return float(np.polyfit(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64), 1)[0])


def residual_check(evaluate, expansion: SingularExpansion, grid: Optional[Iterable[Any]] = None,
                   precision: int = 53, log_power: int = 0) -> ResidualReport:
    """Bounded-ratio test of f(z) - expansion(z) against |1-z|^remainder L(z)^log_power.

    Passes when the least-squares slope of log(ratio) against L(z) over the
    last five grid points stays below ``polylog.slope_limit``.
    """
    grid = tuple(default_grid() if grid is None else grid)
    if len(grid) < 2:
        raise ArgumentError("residual check needs at least two grid points")
    if any(not 0 < float(z) < 1 for z in grid) or any(float(a) >= float(b) for a, b in zip(grid, grid[1:])):
        raise ArgumentError("grid points must lie in (0, 1) and increase")
    points = []
    with mpmath.workprec(max(precision, 53) + 16):
        rem = to_mpf(expansion.remainder_exponent)
        for z in grid:
            res = evaluate(z) - expansion.evaluate(z)
            u = 1 - to_mpf(z)
            points.append(ResidualPoint(z, res, abs(res) / (u ** rem * mpmath.log(1 / u) ** log_power)))
    tail = points[-5:]
    x = [float(mpmath.log(1 / (1 - to_mpf(p.z)))) for p in tail]
    y = [math.log(max(float(p.ratio), 1e-300)) for p in tail]
    slope = _slope(x, y)
    limit = float(setting("polylog.slope_limit"))
    logger.debug("residual check: slope %.4f (limit %.2f)", slope, limit)
    return ResidualReport(tuple(points), expansion.remainder_exponent, slope, slope <= limit)


def expansion_residual_check(pid: PolylogId, expansion: Optional[SingularExpansion] = None,
                             grid: Optional[Iterable[Any]] = None, precision: int = 53) -> ResidualReport:
    """Check an expansion of Li_{alpha,r} against direct summation on a grid approaching 1."""
    if expansion is None:
        expansion = li_expansion(pid)
    return residual_check(lambda z: li_eval(pid, z, precision), expansion, grid, precision, pid.r)


def reconstruction_check(alpha: Any, r: int, grid: Optional[Iterable[Any]] = None) -> ResidualReport:
    """(1-z)^(alpha-1) L^r against sum_k mu_k Li_{alpha,r-k} + c_r."""
    alpha = as_fraction(alpha)
    mu, c = omz_to_li(alpha, r)
    target = SingularExpansion((ExpansionTerm(alpha - 1, r, mpmath.mpf(1)),), alpha - _epsilon(alpha))

    def combo(z: Any) -> mpmath.mpf:
        return mpmath.fsum(mu[k] * li_eval(PolylogId(alpha, r - k), z) for k in range(r + 1)) + c

    return residual_check(combo, target, grid, log_power=r)


def transfer_coefficient(exponent: Any, log_power: int, n: int) -> mpmath.mpf:
    """[z^n] (1-z)^exponent L(z)^log_power.

    Exact for log powers 0 and 1; lead order n^(a-1) (log n)^m / Gamma(a),
    a = -exponent, for higher powers.
    """
    if n < 1:
        raise ArgumentError(f"coefficient index must be >= 1, got {n}")
    if log_power < 0:
        raise ArgumentError("log power must be >= 0")
    a = -to_mpf(exponent)
    if log_power == 0:
        return (-1) ** n * mpmath.binomial(-a, n)
    if a == 0:
        if log_power == 1:
            return mpmath.mpf(1) / n
        return log_power * mpmath.log(n) ** (log_power - 1) / n
    if a < 0 and a == mpmath.floor(a):
        raise DomainError(f"no coefficient transfer for (1-z)^{mpmath.nstr(-a, 6)} L^{log_power}")
    if log_power == 1:
        base = mpmath.gamma(n + a) * mpmath.rgamma(a) / mpmath.factorial(n)
        return base * (mpmath.psi(0, n + a) - mpmath.psi(0, a))
    return mpmath.mpf(n) ** (a - 1) * mpmath.log(n) ** log_power * mpmath.rgamma(a)
