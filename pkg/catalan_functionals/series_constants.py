"""Slowly converging series constants: C_0, D_0, D_1 and K.

Each constant is a sum over n of a toll times w_n = beta_n / 4^n. The sum is
taken directly below a cutoff M; above it w_n is replaced by its asymptotic
series

    w_n ~ n^(-3/2) / sqrt(pi) * sum_j c_j n^(-j),   c = 1, -9/8, 145/128, ...

whose pieces sum in closed form to Hurwitz zeta values (or their
s-derivatives for logarithmic tolls). The first omitted term, doubled, is
reported as the truncation bound.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Dict, Optional, Tuple

import mpmath

from .config import setting
from .errors import ArgumentError, ConvergenceError, DivergenceError
from .numeric import to_mpf
from .types import SeriesConstant, TollSpec

logger = logging.getLogger(__name__)

MAX_TERMS = 12
MAX_CUTOFF = 10 ** 6


def _bernoulli_poly(m: int, x: Fraction) -> Fraction:
    total = Fraction(0)
    for j in range(m + 1):
        p, q = mpmath.bernfrac(j)
        total += comb(m, j) * Fraction(int(p), int(q)) * x ** (m - j)
    return total


@lru_cache(maxsize=None)
def catalan_weight_series(terms: int) -> Tuple[Fraction, ...]:
    """c_0..c_{terms-1} with beta_n/4^n ~ n^(-3/2)/sqrt(pi) sum c_j n^(-j).

    beta_n/4^n = Gamma(n+1/2) / (sqrt(pi) Gamma(n+2)); the Stirling series of
    log Gamma(n+a) - log Gamma(n+b) has coefficients
    (-1)^(k+1) (B_{k+1}(a) - B_{k+1}(b)) / (k(k+1)), which are exponentiated here.
    """
    if terms < 1:
        raise ArgumentError("need at least one term")
    a, b = Fraction(1, 2), Fraction(2)
    s = [Fraction(0)] + [
        (-1) ** (k + 1) * (_bernoulli_poly(k + 1, a) - _bernoulli_poly(k + 1, b)) / (k * (k + 1))
        for k in range(1, terms)
    ]
    e = [Fraction(1)]
    for m in range(1, terms):
        e.append(sum((k * s[k] * e[m - k] for k in range(1, m + 1)), Fraction(0)) / m)
    return tuple(e)


def _hurwitz_tail(s: mpmath.mpf, deriv: int, M: int) -> mpmath.mpf:
    """sum_{n >= M} (log n)^deriv n^(-s)."""
    return (-1) ** deriv * mpmath.zeta(s, M, deriv)


def _toll_shape(toll: TollSpec) -> Tuple[mpmath.mpf, int]:
    """(s0, deriv) such that b_n w_n ~ (log n)^deriv n^(-s0) / sqrt(pi) * (1 + ...)."""
    if toll.kind == "power":
        if toll.alpha >= Fraction(1, 2):
            raise DivergenceError(f"sum of n^{toll.alpha} beta_n/4^n diverges for alpha >= 1/2")
        return mpmath.mpf(3) / 2 - to_mpf(toll.alpha), 0
    if toll.kind == "log":
        return mpmath.mpf(3) / 2, 1
    if toll.kind == "path-length":
        raise DivergenceError("sum of (n-1) beta_n/4^n diverges")
    raise ArgumentError(f"no asymptotic tail for toll {toll.label}")


def _partial(term: Callable[[int, mpmath.mpf], mpmath.mpf], stop: int) -> mpmath.mpf:
    """sum_{n=1}^{stop-1} term(n, w_n), ascending n."""
    w = mpmath.mpf(1)
    parts = []
    for n in range(1, stop):
        w = w * (2 * n - 1) / (2 * (n + 1))
        parts.append(term(n, w))
    return mpmath.fsum(parts)


def _tail(s0: mpmath.mpf, deriv: int, M: int, first: int, terms: int) -> Tuple[mpmath.mpf, mpmath.mpf]:
    c = catalan_weight_series(terms + 1)
    root_pi = mpmath.sqrt(mpmath.pi)
    value = mpmath.fsum(to_mpf(c[j]) * _hurwitz_tail(s0 + j, deriv, M) for j in range(first, terms))
    bound = 2 * abs(to_mpf(c[terms]) * _hurwitz_tail(s0 + terms, deriv, M))
    return value / root_pi, bound / root_pi


def _accelerate(name: str, label: Optional[str], term, s0, deriv: int, first: int,
                tol: Optional[float], cutoff: Optional[int], terms: Optional[int],
                tail_scale: Fraction = Fraction(1)) -> SeriesConstant:
    tol = float(setting("series.tol")) if tol is None else float(tol)
    if tol <= 0:
        raise ArgumentError("tolerance must be positive")
    adaptive = cutoff is None and terms is None
    M = int(setting("series.cutoff")) if cutoff is None else int(cutoff)
    J = int(setting("series.terms")) if terms is None else int(terms)
    if M < 2 or not first < J <= MAX_TERMS:
        raise ArgumentError(f"bad cutoff/terms ({M}, {J})")
    with mpmath.workprec(int(setting("numeric.prec_bits"))):
        while True:
            direct = _partial(term, M)
            tail, bound = _tail(s0, deriv, M, first, J)
            tail, bound = to_mpf(tail_scale) * tail, abs(to_mpf(tail_scale)) * bound
            bound += abs(direct) * mpmath.eps * M
            logger.debug("%s: cutoff=%d terms=%d bound=%s", name, M, J, mpmath.nstr(bound, 3))
            if bound <= tol or not adaptive:
                break
            if J < MAX_TERMS:
                J += 2
            elif M < MAX_CUTOFF:
                M *= 10
            else:
                raise ConvergenceError(f"{name}: bound {mpmath.nstr(bound, 3)} above tolerance {tol}")
        value = direct + tail
    logger.info("%s = %s (bound %s)", name, mpmath.nstr(value, 15), mpmath.nstr(bound, 3))
    return SeriesConstant(name, label, value, bound, M, J)


def _toll_term(toll: TollSpec) -> Callable[[int, mpmath.mpf], mpmath.mpf]:
    scale = to_mpf(toll.scale)
    if toll.kind == "power":
        a = to_mpf(toll.alpha)
        return lambda n, w: scale * mpmath.mpf(n) ** a * w
    return lambda n, w: scale * mpmath.log(n) * w


def c0_constant(toll: TollSpec, tol: Optional[float] = None, *,
                cutoff: Optional[int] = None, terms: Optional[int] = None) -> SeriesConstant:
    """C_0 = sum_n b_n beta_n / 4^n for convergent tolls (alpha < 1/2, log, finite custom)."""
    if toll.kind == "custom":
        with mpmath.workprec(int(setting("numeric.prec_bits"))):
            scale = to_mpf(toll.scale)
            value = _partial(lambda n, w: scale * to_mpf(toll.values[n - 1]) * w, len(toll.values) + 1)
        return SeriesConstant("C0", toll.label, value, mpmath.mpf(0), len(toll.values), 0)
    with mpmath.workprec(int(setting("numeric.prec_bits"))):
        s0, deriv = _toll_shape(toll)
        return _accelerate("C0", toll.label, _toll_term(toll), s0, deriv, 0, tol, cutoff, terms, toll.scale)


def weighted_partial_sum(toll: TollSpec, stop: int) -> mpmath.mpf:
    """sum_{n=1}^{stop-1} b_n beta_n / 4^n by plain summation."""
    with mpmath.workprec(int(setting("numeric.prec_bits"))):
        return _partial(_toll_term(toll), stop)


def weighted_tail(toll: TollSpec, cutoff: int, terms: int) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """Modelled sum_{n >= cutoff} b_n beta_n / 4^n and its truncation bound."""
    with mpmath.workprec(int(setting("numeric.prec_bits"))):
        s0, deriv = _toll_shape(toll)
        tail, bound = _tail(s0, deriv, cutoff, 0, terms)
        scale = to_mpf(toll.scale)
        return scale * tail, abs(scale) * bound


def d0_constant(tol: Optional[float] = None, *, cutoff: Optional[int] = None,
                terms: Optional[int] = None) -> SeriesConstant:
    """D_0 = sum_{n>=1} n^(1/2) (beta_n/4^n - n^(-3/2)/sqrt(pi))."""
    with mpmath.workprec(int(setting("numeric.prec_bits"))):
        inv_root_pi = 1 / mpmath.sqrt(mpmath.pi)

        def term(n: int, w: mpmath.mpf) -> mpmath.mpf:
            return mpmath.sqrt(n) * w - inv_root_pi / n

        return _accelerate("D0", None, term, mpmath.mpf(1), 0, 1, tol, cutoff, terms)


def d1_constant(tol: Optional[float] = None) -> SeriesConstant:
    """D_1 = (2 log 2 + gamma + sqrt(pi) D_0) / sqrt(pi)."""
    d0 = d0_constant(tol)
    with mpmath.workprec(int(setting("numeric.prec_bits"))):
        root_pi = mpmath.sqrt(mpmath.pi)
        value = (2 * mpmath.log(2) + mpmath.euler + root_pi * d0.value) / root_pi
    return SeriesConstant("D1", None, value, d0.bound, d0.cutoff, d0.terms)


def k_constant(tol: Optional[float] = None, *, cutoff: Optional[int] = None,
               terms: Optional[int] = None) -> SeriesConstant:
    """K = sum_{n>=1} (log n)^2 beta_n / 4^n."""
    with mpmath.workprec(int(setting("numeric.prec_bits"))):
        return _accelerate("Kconst", "log^2", lambda n, w: mpmath.log(n) ** 2 * w,
                           mpmath.mpf(3) / 2, 2, 0, tol, cutoff, terms)


def constant_by_name(name: str, toll: Optional[TollSpec] = None, tol: Optional[float] = None) -> SeriesConstant:
    key = name.strip().lower()
    if key == "c0":
        if toll is None:
            raise ArgumentError("C0 needs a toll")
        return c0_constant(toll, tol)
    if key == "d0":
        return d0_constant(tol)
    if key == "d1":
        return d1_constant(tol)
    if key in ("k", "kconst"):
        return k_constant(tol)
    raise ArgumentError(f"unknown constant {name!r}; expected c0, d0, d1 or k")


def constants_for_toll(toll: TollSpec) -> Dict[str, mpmath.mpf]:
    """Named constants a mean expansion of this toll may refer to."""
    if toll.kind == "power" and toll.alpha == Fraction(1, 2):
        # D_0 and D_1 belong to the unscaled toll n^(1/2)
        with mpmath.workprec(int(setting("numeric.prec_bits"))):
            scale = to_mpf(toll.scale)
            return {"D0": scale * d0_constant().value, "D1": scale * d1_constant().value}
    if (toll.kind == "power" and toll.alpha < Fraction(1, 2)) or toll.kind == "log":
        return {"C0": c0_constant(toll).value}
    return {}