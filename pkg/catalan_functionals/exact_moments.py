"""Exact and high-precision moments of X_n for all n <= N, k <= K.

Conditioning on the size of the left subtree gives, for the normalised
moments  mu_bar_n(k) = beta_n E[X_n^k] / 4^n,

    mu_bar_n(k) = 1/2 sum_j w_{n-j} mu_bar_{j-1}(k) + r_n(k),
    r_n(k)      = 1/4 sum_{k1+k2+k3=k; k1,k2<k} multinomial * b_n^k3
                      * sum_j mu_bar_{j-1}(k1) mu_bar_{n-j}(k2),

with w_n = beta_n / 4^n. Order by order the inner sums are Cauchy products of
already finished sequences, and the linear part inverts to a product with the
coefficients of (1-z)^(-1/2). Centering X_n - c0(n+1) keeps the toll and only
moves the start value to X_0 = -c0.

Cost is O(N^2) per distinct pair (k1, k2), at most a few dozen pairs for K <= 6.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

import mpmath

from .config import setting
from .errors import ArgumentError, CapError, OrderError
from .numeric import NumericField, gamma_signed, make_field, to_mpf
from .types import Centering, MomentTable, TollSpec

logger = logging.getLogger(__name__)


def compositions(k: int) -> Iterator[Tuple[int, int, int]]:
    """(k1, k2, k3) with k1 + k2 + k3 = k and k1, k2 < k, k1 then k2 ascending."""
    for k1 in range(k):
        for k2 in range(k - k1 + 1):
            if k2 < k:
                yield k1, k2, k - k1 - k2


def multinomial(k: int, k1: int, k2: int, k3: int) -> int:
    return math.factorial(k) // (math.factorial(k1) * math.factorial(k2) * math.factorial(k3))


def _field_for(toll: TollSpec, field: Optional[NumericField]) -> NumericField:
    return field if field is not None else make_field(toll.field, toll.prec if toll.field == "float" else None)


def _check_sizes(N: int, K: int) -> None:
    if N < 1:
        raise ArgumentError(f"N must be >= 1, got {N}")
    if K < 1:
        raise ArgumentError(f"K must be >= 1, got {K}")
    max_n, max_k = int(setting("exact_moments.max_n")), int(setting("exact_moments.max_k"))
    if N > max_n:
        raise CapError(f"N = {N} exceeds the cap {max_n}")
    if K > max_k:
        raise CapError(f"K = {K} exceeds the cap {max_k}")


def _normalized_moments(field: NumericField, b: Any, N: int, K: int, c0: Any) -> Tuple[Any, List[Any]]:
    w = field.weights(N)
    half = field.half_weights(N)
    bpow = [field.power(b, j) for j in range(K + 1)]
    start = field.convert(-c0) if c0 else field.convert(0)
    mu = [w]
    products: Dict[Tuple[int, int], Any] = {}
    for k in range(1, K + 1):
        r = field.zeros(N + 1)
        r[0] = start ** k
        for k1, k2, k3 in compositions(k):
            key = (min(k1, k2), max(k1, k2))
            if key not in products:
                products[key] = field.convolve(mu[key[0]], mu[key[1]], N)
            coef = field.convert(Fraction(multinomial(k, k1, k2, k3), 4))
            field.accumulate_shifted(r, coef, bpow[k3], products[key])
        mu.append(field.convolve(half, r, N + 1))
        logger.debug("order %d done (%d products cached)", k, len(products))
    return w, mu


def _build_table(toll: TollSpec, N: int, K: int, centering: Centering, field: NumericField) -> MomentTable:
    with field.context():
        b = field.tolls(toll, N)
        w, mu = _normalized_moments(field, b, N, K, centering.c0 if centering.kind == "linear" else 0)
        cols = [field.ratio(m, w) for m in mu]
        values = tuple(tuple(field.scalar(col[n]) for col in cols) for n in range(N + 1))
        weights = field.to_tuple(w)
    logger.info("moment table %s N=%d K=%d centering=%s field=%s", toll.label, N, K, centering.label, field.tag)
    return MomentTable(toll, N, K, centering, field.tag, field.prec, values, weights)


def mean_profile(toll: TollSpec, N: int, field: Optional[NumericField] = None) -> List[Any]:
    """a_n = E X_n for n = 0..N (index n holds a_n, a_0 = 0), straight from the mean recurrence."""
    if N < 1:
        raise ArgumentError(f"N must be >= 1, got {N}")
    field = _field_for(toll, field)
    with field.context():
        b = field.tolls(toll, N)
        w = field.weights(N)
        half = field.convert(Fraction(1, 2))
        mbar = field.zeros(N + 1)
        for n in range(1, N + 1):
            mbar[n] = half * field.dot(mbar[:n], w[n - 1::-1]) + w[n] * b[n]
        a = field.ratio(mbar, w)
        return [field.scalar(v) for v in a]


def raw_moments(toll: TollSpec, N: int, K: int, field: Optional[NumericField] = None) -> MomentTable:
    _check_sizes(N, K)
    return _build_table(toll, N, K, Centering(), _field_for(toll, field))


def centered_moments(toll: TollSpec, c0: Any, N: int, K: int, field: Optional[NumericField] = None) -> MomentTable:
    """Moments of X_n - c0 (n+1)."""
    _check_sizes(N, K)
    field = _field_for(toll, field)
    with field.context():
        c0 = field.scalar(field.convert(c0))
    return _build_table(toll, N, K, Centering("linear", c0), field)


def profile_centered_moments(table: MomentTable, profile: Callable[[int], Any], name: str) -> MomentTable:
    """Moments of X_n - h(n) for an explicit profile h, by the binomial transform of a raw table."""
    if table.centering.kind != "none":
        raise ArgumentError("profile centering starts from a raw table")
    field = make_field(table.field, table.prec)
    rows = []
    with field.context():
        for n, row in enumerate(table.values):
            shift = field.convert(-profile(n))
            out = []
            for k in range(table.K + 1):
                out.append(field.scalar(sum((math.comb(k, i) * field.convert(row[i]) * shift ** (k - i)
                                             for i in range(k + 1)), field.convert(0))))
            rows.append(tuple(out))
    return MomentTable(table.toll, table.N, table.K, Centering("profile", 0, name),
                       table.field, table.prec, tuple(rows), table.weights)


def linear_profile(c0: Any) -> Callable[[int], Any]:
    return lambda n: c0 * (n + 1)


def half_profile(d1: Any) -> Callable[[int], mpmath.mpf]:
    """pi^(-1/2) (n+1) log(n+1) + D_1 (n+1), the centering for b_n = n^(1/2)."""
    d1 = to_mpf(d1)
    return lambda n: (n + 1) * mpmath.log(n + 1) / mpmath.sqrt(mpmath.pi) + d1 * (n + 1)


def power_profile(alpha: Any, c0: Any = 0) -> Callable[[int], mpmath.mpf]:
    """C_0 (n+1) [alpha < 1/2] + Gamma(alpha-1/2)/Gamma(alpha) (n+1)^(alpha+1/2)."""
    a = to_mpf(alpha)
    if a == mpmath.mpf(1) / 2:
        raise ArgumentError("alpha = 1/2 uses half_profile")
    lead = gamma_signed(a - mpmath.mpf(1) / 2) / mpmath.gamma(a)
    linear = to_mpf(c0) if a < mpmath.mpf(1) / 2 else mpmath.mpf(0)
    return lambda n: linear * (n + 1) + lead * mpmath.mpf(n + 1) ** (a + mpmath.mpf(1) / 2)


def variance_profile(table: MomentTable) -> List[Any]:
    if table.K < 2:
        raise OrderError(f"variance needs K >= 2, table has K = {table.K}")
    return [row[2] - row[1] ** 2 for row in table.values]
