"""Limit laws of X_n: moment sequences, variance constants, mean expansions.

For the toll n^alpha (alpha != 1/2) X_n / n^(alpha+1/2) converges with all
moments to Y, E Y^k = C_k sqrt(pi) / Gamma(k(alpha+1/2) - 1/2), where C_k
solves a quadratic recurrence. At alpha = 1 this is the Airy law, at alpha = 2
the Wiener-index law. The log toll gives a normal limit.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, List, Mapping, Optional, Sequence, Tuple

import mpmath

from .config import setting
from .errors import ArgumentError, PoleError
from .exact_moments import mean_profile
from .numeric import NumericField, as_fraction, gamma_signed, to_mpf
from .polylog import transfer_coefficient
from .types import (ExpansionTerm, LimitLaw, ScaledLimitReport, ScaledMoment, ShapeLimit,
                    SingularExpansion, TollSpec)

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
EXACT_ALPHA_MAX = 100


def _alpha(alpha: Any) -> Fraction:
    alpha = as_fraction(alpha)
    if alpha <= 0:
        raise ArgumentError(f"alpha must be > 0, got {alpha}")
    return alpha


def _check_k(K: int) -> None:
    if K < 1:
        raise ArgumentError(f"K must be >= 1, got {K}")


def _prec() -> int:
    return int(setting("numeric.prec_bits"))


def _cheap_exact(alpha: Fraction) -> bool:
    return alpha.denominator == 1 and alpha <= EXACT_ALPHA_MAX


def _rising(x: Fraction, m: int) -> Fraction:
    out = Fraction(1)
    for i in range(m):
        out *= x + i
    return out


def ck_sequence(alpha: Any, K: int, exact: Optional[bool] = None) -> List[Any]:
    """C_1..C_K; Fractions for integer alpha unless ``exact`` is False, mpf otherwise."""
    alpha = _alpha(alpha)
    _check_k(K)
    if alpha == HALF:
        raise PoleError("C_1 = Gamma(alpha - 1/2)/sqrt(pi) has a pole at alpha = 1/2")
    if exact is None:
        exact = alpha.denominator == 1
    if exact and alpha.denominator != 1:
        raise ArgumentError(f"C_k is rational only for integer alpha, got {alpha}")
    if exact:
        m = int(alpha)
        # Gamma(alpha - 1/2)/sqrt(pi) = (1/2)(3/2)...(alpha - 3/2)
        c = [_rising(HALF, m - 1)]
        for k in range(2, K + 1):
            x = (k - 1) * alpha + Fraction(k, 2) - 1
            quad = sum((math.comb(k, j) * c[j - 1] * c[k - j - 1] for j in range(1, k)), Fraction(0)) / 4
            c.append(quad + k * c[k - 2] * _rising(x, m))
        return c
    a = to_mpf(alpha)
    c = [gamma_signed(a - mpmath.mpf(1) / 2) / mpmath.sqrt(mpmath.pi)]
    for k in range(2, K + 1):
        quad = mpmath.fsum(math.comb(k, j) * c[j - 1] * c[k - j - 1] for j in range(1, k)) / 4
        shift = (k - 1) * a + mpmath.mpf(k) / 2 - 1
        c.append(quad + k * c[k - 2] * mpmath.exp(mpmath.loggamma(shift + a) - mpmath.loggamma(shift)))
    return c


def limit_moments(alpha: Any, K: int) -> List[mpmath.mpf]:
    """E Y^1..E Y^K."""
    alpha = _alpha(alpha)
    if alpha == HALF:
        raise PoleError("alpha = 1/2 degenerates; use the m_k recurrence (mk_sequence_half)")
    # rising products get long for large integer alpha
    c = ck_sequence(alpha, K, exact=_cheap_exact(alpha))
    a = to_mpf(alpha + HALF)
    root_pi = mpmath.sqrt(mpmath.pi)
    return [to_mpf(c[k - 1]) * root_pi / mpmath.gamma(k * a - mpmath.mpf(1) / 2) for k in range(1, K + 1)]


def _central(raw: Sequence[Any], K: int) -> List[mpmath.mpf]:
    """E(Y-EY)^1..E(Y-EY)^K from E Y^1..E Y^K."""
    moments = [mpmath.mpf(1)] + [to_mpf(v) for v in raw]
    mean = moments[1]
    return [mpmath.fsum(math.comb(k, i) * moments[i] * (-mean) ** (k - i) for i in range(k + 1))
            for k in range(1, K + 1)]


def central_limit_moments(alpha: Any, K: int) -> List[mpmath.mpf]:
    with mpmath.workprec(_prec() + 8 * K):
        out = _central(limit_moments(alpha, K), K)
    return [+v for v in out]


def sigma_sq(alpha: Any) -> mpmath.mpf:
    """C_2 sqrt(pi)/Gamma(2 alpha + 1/2) - C_1^2 pi / Gamma(alpha)^2."""
    alpha = _alpha(alpha)
    if alpha == HALF:
        raise PoleError("sigma^2 has a removable singularity at alpha = 1/2; use sigma_sq_half")
    with mpmath.workprec(_prec()):
        c = [to_mpf(v) for v in ck_sequence(alpha, 2, exact=_cheap_exact(alpha))]
        a = to_mpf(alpha)
        return (c[1] * mpmath.sqrt(mpmath.pi) / mpmath.gamma(2 * a + mpmath.mpf(1) / 2)
                - c[0] ** 2 * mpmath.pi / mpmath.gamma(a) ** 2)


def sigma_sq_half() -> mpmath.mpf:
    """8 log 2 / pi - pi / 2."""
    with mpmath.workprec(_prec()):
        return 8 * mpmath.log(2) / mpmath.pi - mpmath.pi / 2


def limit_law(alpha: Any, K: int) -> LimitLaw:
    alpha = _alpha(alpha)
    _check_k(K)
    with mpmath.workprec(_prec()):
        c = ck_sequence(alpha, K, exact=_cheap_exact(alpha))
        raw = limit_moments(alpha, K)
        law = LimitLaw(alpha, tuple(c), tuple(raw), sigma_sq(alpha), tuple(central_limit_moments(alpha, K)))
    logger.info("limit law alpha=%s K=%d sigma^2=%s", alpha, K, mpmath.nstr(law.sigma2, 12))
    return law


def airy_omega(K: int) -> List[Fraction]:
    """Omega_1..Omega_K: 2 Omega_k = sum_j C(k,j) Omega_j Omega_{k-j} + k(3k-4) Omega_{k-1}."""
    _check_k(K)
    om = [Fraction(1, 2)]
    for k in range(2, K + 1):
        quad = sum((math.comb(k, j) * om[j - 1] * om[k - j - 1] for j in range(1, k)), Fraction(0))
        om.append((quad + k * (3 * k - 4) * om[k - 2]) / 2)
    return om


def wiener_a0(K: int) -> List[Fraction]:
    """a_{0,1}..a_{0,K}: a_{0,l} = 1/2 sum_j C(l,j) a_{0,j} a_{0,l-j} + l(5l-4)(5l-6) a_{0,l-1}."""
    _check_k(K)
    a = [Fraction(1)]
    for l in range(2, K + 1):
        quad = sum((math.comb(l, j) * a[j - 1] * a[l - j - 1] for j in range(1, l)), Fraction(0))
        a.append(quad / 2 + l * (5 * l - 4) * (5 * l - 6) * a[l - 2])
    return a


def shape_limit_moments(K: int) -> ShapeLimit:
    """Normal limit of the log toll: sigma^2 = 8(1 - log 2), Gaussian moments and C_{2k,0}."""
    _check_k(K)
    with mpmath.workprec(_prec()):
        s2 = 8 * (1 - mpmath.log(2))
        moments = tuple(mpmath.mpf(0) if k % 2 else mpmath.fac2(k - 1) * s2 ** (k // 2)
                        for k in range(1, K + 1))
        c2k0 = []
        for k in range(1, max(K // 2, 2) + 1):
            num = mpmath.factorial(2 * k) * mpmath.factorial(2 * k - 2)
            den = 2 ** k * 2 ** (2 * k - 2) * mpmath.factorial(k) * mpmath.factorial(k - 1)
            c2k0.append(num / den * s2 ** k)
        deviation = mpmath.mpf(0)
        for l in range(2, len(c2k0) + 1):
            rhs = mpmath.fsum(math.comb(2 * l, 2 * j) * c2k0[j - 1] * c2k0[l - j - 1] for j in range(1, l)) / 4
            deviation = max(deviation, abs(rhs - c2k0[l - 1]) / abs(c2k0[l - 1]))
    return ShapeLimit(s2, moments, tuple(c2k0), deviation)


def _gaussian_central(k: int, variance: mpmath.mpf) -> mpmath.mpf:
    return mpmath.mpf(0) if k % 2 else mpmath.fac2(k - 1) * variance ** (k // 2)


def scaled_limit_checks(alpha: Any, K: int) -> ScaledLimitReport:
    """Small alpha: alpha^(-k/2) E(Y-EY)^k against N(0, 4(1-log 2)).
    The moments are centred; alpha^(-1/2) E Y = alpha^(-1/2) Gamma(alpha-1/2)/Gamma(alpha) tends to 0,
    so alpha^(-k/2) E Y^k has the same limits.
    Large alpha: alpha^(k/2) E Y^k against sqrt(k!).
    """
    alpha = _alpha(alpha)
    _check_k(K)
    guard = 32 + K * int(abs(math.log2(float(alpha))) + 1)
    rows = []
    with mpmath.workprec(_prec() + guard):
        a = to_mpf(alpha)
        if alpha < 1:
            regime = "small"
            variance = 4 * (1 - mpmath.log(2))
            central = _central(limit_moments(alpha, K), K)
            for k in range(1, K + 1):
                value = a ** (-mpmath.mpf(k) / 2) * central[k - 1]
                target = _gaussian_central(k, variance)
                dev = abs(value - target) / target if k % 2 == 0 else abs(value - target)
                rows.append(ScaledMoment(k, +value, target, +dev))
        else:
            regime = "large"
            raw = limit_moments(alpha, K)
            for k in range(1, K + 1):
                value = a ** (mpmath.mpf(k) / 2) * raw[k - 1]
                target = mpmath.sqrt(mpmath.factorial(k))
                rows.append(ScaledMoment(k, +value, target, abs(value - target) / target))
    return ScaledLimitReport(alpha, regime, tuple(rows))


def moment_growth(alpha: Any, K: int) -> List[mpmath.mpf]:
    """|C_k sqrt(pi) / (k! Gamma(k(alpha+1/2) - 1/2))|^(1/k) for k = 1..K."""
    with mpmath.workprec(_prec()):
        raw = limit_moments(alpha, K)
        return [abs(raw[k - 1] / mpmath.factorial(k)) ** (mpmath.mpf(1) / k) for k in range(1, K + 1)]


def golden_section_max(f, lo: float, hi: float, tol: float) -> Tuple[float, Any]:
    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _sigma_sq_any(alpha: Any) -> mpmath.mpf:
    return sigma_sq_half() if as_fraction(alpha) == HALF else sigma_sq(alpha)


def maximize_sigma_sq(interval: Optional[Tuple[float, float]] = None, tol: Optional[float] = None) -> Tuple[float, mpmath.mpf]:
    """Location and value of the maximum of sigma^2(alpha) over the search interval."""
    lo, hi = interval or tuple(setting("limit_law.search_interval"))
    tol = float(setting("limit_law.search_tol")) if tol is None else tol
    if not 0 < lo < hi:
        raise ArgumentError(f"bad search interval ({lo}, {hi})")
    alpha, value = golden_section_max(_sigma_sq_any, float(lo), float(hi), tol)
    logger.info("sigma^2 is largest at alpha=%.6f: %s", alpha, mpmath.nstr(value, 10))
    return alpha, value


def alpha_grid(start: Any = "1/10", stop: Any = 3, step: Any = "1/10") -> List[Fraction]:
    start, stop, step = as_fraction(start), as_fraction(stop), as_fraction(step)
    if step <= 0 or start <= 0 or stop < start:
        raise ArgumentError(f"empty or invalid alpha grid ({start}, {stop}, {step})")
    out, x = [], start
    while x <= stop:
        out.append(x)
        x += step
    return out


def variance_curve(grid: Iterable[Any]) -> List[Tuple[Fraction, mpmath.mpf]]:
    rows = [(as_fraction(a), _sigma_sq_any(a)) for a in grid]
    if not rows:
        raise ArgumentError("empty alpha grid")
    return rows


def third_moment_curve(grid: Iterable[Any]) -> List[Tuple[Fraction, mpmath.mpf]]:
    """E(Y-EY)^3 per alpha; alpha = 1/2 takes m_3 of the logarithmic recurrence."""
    from .integrals import mk_sequence_half

    rows = []
    for a in grid:
        a = as_fraction(a)
        rows.append((a, mk_sequence_half(3).m[3] if a == HALF else central_limit_moments(a, 3)[2]))
    if not rows:
        raise ArgumentError("empty alpha grid")
    return rows


@dataclass(frozen=True)
class MeanAsymptotics:
    """Singular expansion of sum_n beta_n E[X_n] z^n / 4^n and its transfer to a_n."""

    toll: TollSpec
    expansion: SingularExpansion

    def approx_mean(self, n: int, constants: Optional[Mapping[str, Any]] = None) -> mpmath.mpf:
        expansion = self.expansion.resolve(constants or {}) if self.expansion.symbols else self.expansion
        w = mpmath.mpf(1)
        for j in range(1, n + 1):
            w = w * (2 * j - 1) / (2 * (j + 1))
        total = mpmath.fsum(to_mpf(t.coefficient) * transfer_coefficient(t.exponent, t.log_power, n)
                            for t in expansion.terms)
        return total / w


def mean_asymptotics(toll: TollSpec) -> MeanAsymptotics:
    eps = as_fraction(setting("polylog.epsilon"))
    scale = toll.scale
    with mpmath.workprec(_prec()):
        root_pi = mpmath.sqrt(mpmath.pi)
        if toll.kind == "power":
            a = toll.alpha
            lead = to_mpf(scale) * gamma_signed(to_mpf(a) - mpmath.mpf(1) / 2) / root_pi if a != HALF else None
            if a < HALF:
                terms = [ExpansionTerm(-HALF, 0, symbol="C0"), ExpansionTerm(-a, 0, lead)]
                rem = -a + HALF
            elif a == HALF:
                terms = [ExpansionTerm(-HALF, 1, to_mpf(scale) / root_pi), ExpansionTerm(-HALF, 0, symbol="D0")]
                rem = HALF - eps
            else:
                terms = [ExpansionTerm(-a, 0, lead)]
                rem = -HALF if a < 1 else (-HALF - eps if a == 1 else -a + HALF)
        elif toll.kind == "log":
            s = to_mpf(scale)
            const = -2 * (2 * (1 - mpmath.log(2)) - mpmath.euler)
            terms = [ExpansionTerm(-HALF, 0, symbol="C0"), ExpansionTerm(Fraction(0), 1, -2 * s),
                     ExpansionTerm(Fraction(0), 0, s * const)]
            rem = HALF
        else:
            raise ArgumentError(f"mean expansion is available for power and log tolls, not {toll.label}")
    return MeanAsymptotics(toll, SingularExpansion(tuple(terms), rem, has_constant=toll.kind == "log"))


def mean_residuals(toll: TollSpec, N: int, field: Optional[NumericField] = None,
                   constants: Optional[Mapping[str, Any]] = None) -> List[Tuple[int, mpmath.mpf]]:
    """(n, a_n - approx_mean(n)) for n = 1..N."""
    from .series_constants import constants_for_toll

    asym = mean_asymptotics(toll)
    if constants is None and asym.expansion.symbols:
        constants = constants_for_toll(toll)
    means = mean_profile(toll, N, field)
    out = []
    with mpmath.workprec(_prec()):
        expansion = asym.expansion.resolve(constants or {})
        w = mpmath.mpf(1)
        for n in range(1, N + 1):
            w = w * (2 * n - 1) / (2 * (n + 1))
            approx = mpmath.fsum(to_mpf(t.coefficient) * transfer_coefficient(t.exponent, t.log_power, n)
                                 for t in expansion.terms) / w
            out.append((n, to_mpf(means[n]) - approx))
    return out
