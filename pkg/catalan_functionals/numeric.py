"""Numeric fields and small special-function helpers.

The moment engine is written once against :class:`NumericField` and runs in
three instantiations:

* ``RationalField``: exact ``fractions.Fraction`` arithmetic on lists;
* ``MpmathField``: binary floats with ``prec`` bits of mantissa, ``mpmath.mpf`` lists;
* ``DoubleField``: numpy float64 arrays, for tables with thousands of rows.

Sequences are indexed from 0. Every operation sums in ascending index order,
so a table is reproducible for a fixed field and precision.
"""

from __future__ import annotations

import contextlib
import logging
from fractions import Fraction
from operator import mul
from typing import Any, Iterable, Sequence

import mpmath
import numpy as np

from .errors import ArgumentError, FieldError, PoleError

logger = logging.getLogger(__name__)


def to_mpf(x: Any) -> mpmath.mpf:
    """Convert ints, Fractions, floats, numpy scalars and mpf values to mpf."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, np.generic):
        return mpmath.mpf(float(x))
    return mpmath.mpf(x)


def as_fraction(x: Any) -> Fraction:
    """Exact rational for a user-facing real such as ``"1/4"``, ``0.5`` or ``3``.

    Floats go through their shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ArgumentError(f"not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        if not np.isfinite(x):
            raise ArgumentError(f"not a finite number: {x!r}")
        return Fraction(repr(float(x)))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ArgumentError(f"cannot read {x!r} as a number") from e
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        return Fraction(man) * Fraction(2) ** exp
    raise ArgumentError(f"unsupported number type {type(x).__name__}")


def gamma_signed(x: Any) -> mpmath.mpf:
    """Gamma on the real line, using the reflection formula for negative arguments."""
    x = to_mpf(x)
    if x <= 0 and x == mpmath.floor(x):
        raise PoleError(f"Gamma has a pole at {mpmath.nstr(x, 10)}")
    if x < 0:
        return mpmath.pi / (mpmath.sinpi(x) * mpmath.gamma(1 - x))
    return mpmath.gamma(x)


def format_number(x: Any, digits: int = 17) -> str:
    """``p/q`` for rationals, ``digits`` significant digits otherwise."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return mpmath.nstr(to_mpf(x), digits)


class NumericField:
    tag: str = ""
    prec: int | None = None

    def context(self):
        return contextlib.nullcontext()

    def convert(self, x: Any) -> Any:
        raise NotImplementedError

    def scalar(self, x: Any) -> Any:
        """Storage form of one computed value."""
        return x

    def sequence(self, items: Iterable[Any]) -> Any:
        return [self.convert(v) for v in items]

    def zeros(self, length: int) -> Any:
        return [self.convert(0)] * length

    def weights(self, N: int) -> Any:
        """beta_n / 4^n for n = 0..N."""
        w = [Fraction(1)]
        for n in range(1, N + 1):
            w.append(w[-1] * (2 * n - 1) / (2 * (n + 1)))
        return self.sequence(w)

    def half_weights(self, N: int) -> Any:
        """Coefficients of (1-z)^(-1/2): binom(2j, j) / 4^j = (j+1) beta_j / 4^j."""
        c = [Fraction(1)]
        for j in range(1, N + 1):
            c.append(c[-1] * (2 * j - 1) / (2 * j))
        return self.sequence(c)

    def tolls(self, toll, N: int) -> Any:
        """b_0..b_N with b_0 = 0."""
        raise NotImplementedError

    def power(self, seq: Any, k: int) -> Any:
        return [v ** k for v in seq]

    def convolve(self, a: Sequence, b: Sequence, length: int) -> Any:
        out = []
        for m in range(length):
            out.append(sum(map(mul, a[:m + 1], b[m::-1]), self.convert(0)))
        return out

    def accumulate_shifted(self, target: list, coef: Any, a: Sequence, b: Sequence) -> None:
        """target[n] += coef * a[n] * b[n-1] for n >= 1."""
        for n in range(1, len(target)):
            target[n] += coef * a[n] * b[n - 1]

    def dot(self, a: Sequence, b: Sequence) -> Any:
        return sum(map(mul, a, b), self.convert(0))

    def ratio(self, a: Sequence, b: Sequence) -> Any:
        return [x / y for x, y in zip(a, b)]

    def to_tuple(self, seq: Sequence) -> tuple:
        return tuple(self.scalar(v) for v in seq)


class RationalField(NumericField):
    tag = "rational"
    prec = None

    def convert(self, x: Any) -> Fraction:
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return Fraction(x)
        raise FieldError(f"value {x!r} is not rational; use the float field")

    def tolls(self, toll, N: int) -> list:
        from .tolls import rational_toll_values
        return rational_toll_values(toll, N)


class MpmathField(NumericField):
    tag = "float"

    def __init__(self, prec: int):
        if prec < 2:
            raise ArgumentError(f"precision must be at least 2 bits, got {prec}")
        self.prec = prec

    def context(self):
        return mpmath.workprec(self.prec)

    def convert(self, x: Any) -> mpmath.mpf:
        return to_mpf(x)

    def tolls(self, toll, N: int) -> list:
        from .tolls import mp_toll_values
        return mp_toll_values(toll, N)

    def convolve(self, a: Sequence, b: Sequence, length: int) -> list:
        return [mpmath.fdot(a[:m + 1], b[m::-1]) for m in range(length)]

    def dot(self, a: Sequence, b: Sequence) -> mpmath.mpf:
        return mpmath.fdot(a, b)


class DoubleField(NumericField):
    tag = "float"
    prec = 53

    def convert(self, x: Any) -> float:
        return float(x)

    def scalar(self, x: Any) -> float:
        return float(x)

    def sequence(self, items: Iterable[Any]) -> np.ndarray:
        return np.array([self.convert(v) for v in items], dtype=np.float64)

    def zeros(self, length: int) -> np.ndarray:
        return np.zeros(length, dtype=np.float64)

    def weights(self, N: int) -> np.ndarray:
        with mpmath.workprec(80):
            w = [mpmath.mpf(1)]
            for n in range(1, N + 1):
                w.append(w[-1] * (2 * n - 1) / (2 * (n + 1)))
        return np.array([float(v) for v in w], dtype=np.float64)

    def half_weights(self, N: int) -> np.ndarray:
        return self.weights(N) * np.arange(1, N + 2, dtype=np.float64)

    def tolls(self, toll, N: int) -> np.ndarray:
        from .tolls import double_toll_values
        return double_toll_values(toll, N)

    def power(self, seq: np.ndarray, k: int) -> np.ndarray:
        return np.power(seq, k)

    def convolve(self, a: np.ndarray, b: np.ndarray, length: int) -> np.ndarray:
        return np.convolve(a[:length], b[:length])[:length]

    def accumulate_shifted(self, target: np.ndarray, coef: Any, a: np.ndarray, b: np.ndarray) -> None:
        target[1:] += float(coef) * a[1:len(target)] * b[:len(target) - 1]

    def dot(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.dot(a, b))

    def ratio(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a / b


def make_field(tag: str = "float", prec: int | None = None) -> NumericField:
    """Field for a tag: rationals, float64 when ``prec <= 53``, mpmath otherwise."""
    if tag == "rational":
        return RationalField()
    if tag != "float":
        raise ArgumentError(f"unknown numeric field {tag!r}")
    if prec is None:
        from .config import setting
        prec = int(setting("numeric.prec_bits"))
    if prec <= 53:
        return DoubleField()
    return MpmathField(prec)
