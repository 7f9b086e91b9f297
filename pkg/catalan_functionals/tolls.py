from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, List, Literal

import mpmath
import numpy as np

from .errors import ArgumentError, FieldError
from .numeric import as_fraction, to_mpf
from .types import FieldTag, TollSpec


def sniff_toll_kind(text: str) -> Literal["power", "log", "path-length", "custom", "unknown"]:
    s = text.strip().lower()
    if s.startswith("pow:") or s.startswith("power:"):
        return "power"
    if s == "log":
        return "log"
    if s in ("path-length", "pathlength", "path"):
        return "path-length"
    if s.startswith("custom:"):
        return "custom"
    return "unknown"


def parse_toll(text: str, *, field: FieldTag = "float", prec: int = 128) -> TollSpec:
    """Read ``pow:A``, ``log``, ``path-length`` or ``custom:b1,b2,...``, with an optional ``*c`` scale."""
    body, scale = text.strip(), Fraction(1)
    if "*" in body:
        body, _, factor = body.rpartition("*")
        scale = as_fraction(factor)
        if scale == 0:
            raise ArgumentError("toll scale must be nonzero")
    kind = sniff_toll_kind(body)
    if kind == "unknown":
        raise ArgumentError(f"unrecognised toll {text!r}; expected pow:A, log, path-length or custom:b1,b2,...")
    if kind == "power":
        return TollSpec("power", alpha=as_fraction(body.split(":", 1)[1]), scale=scale, field=field, prec=prec)
    if kind == "custom":
        entries = [e for e in body.split(":", 1)[1].split(",") if e.strip()]
        values = tuple(_custom_entry(e) for e in entries)
        return TollSpec("custom", values=values, scale=scale, field=field, prec=prec)
    return TollSpec(kind, scale=scale, field=field, prec=prec)


def _custom_entry(text: str) -> Any:
    text = text.strip()
    if any(c in text for c in ".eE"):
        try:
            return float(text)
        except ValueError as e:
            raise ArgumentError(f"bad custom toll entry {text!r}") from e
    return as_fraction(text)


def power_toll(alpha: Any, *, field: FieldTag = "float", prec: int = 128) -> TollSpec:
    return TollSpec("power", alpha=as_fraction(alpha), field=field, prec=prec)


def scaled(toll: TollSpec, c: Any) -> TollSpec:
    return TollSpec(toll.kind, toll.alpha, toll.values, toll.scale * as_fraction(c), toll.field, toll.prec)


def _check_custom_length(toll: TollSpec, n: int) -> None:
    if toll.kind == "custom" and n > len(toll.values):
        raise ArgumentError(f"custom toll defines b_1..b_{len(toll.values)}, size {n} requested")


def toll_value(toll: TollSpec, n: int) -> Any:
    """b_n for one size; exact (int or Fraction) when the toll is rational, float otherwise."""
    if n < 1:
        raise ArgumentError(f"toll is defined for n >= 1, got {n}")
    _check_custom_length(toll, n)
    if toll.kind == "power":
        if toll.alpha.denominator == 1:
            base = Fraction(n) ** toll.alpha.numerator
        else:
            base = float(n) ** float(toll.alpha)
    elif toll.kind == "path-length":
        base = Fraction(n - 1)
    elif toll.kind == "log":
        base = math.log(n)
    else:
        base = toll.values[n - 1]
    if isinstance(base, Fraction):
        return base * toll.scale
    return float(base) * float(toll.scale)


def rational_toll_values(toll: TollSpec, N: int) -> List[Fraction]:
    if not toll.is_rational:
        raise FieldError(f"toll {toll.label} has irrational values; the rational field cannot hold them")
    _check_custom_length(toll, N)
    return [Fraction(0)] + [toll_value(toll, n) for n in range(1, N + 1)]


def mp_toll_values(toll: TollSpec, N: int) -> List[mpmath.mpf]:
    _check_custom_length(toll, N)
    scale = to_mpf(toll.scale)
    if toll.kind == "power":
        alpha = to_mpf(toll.alpha)
        base = [mpmath.mpf(n) ** alpha for n in range(1, N + 1)]
    elif toll.kind == "log":
        base = [mpmath.log(n) for n in range(1, N + 1)]
    elif toll.kind == "path-length":
        base = [mpmath.mpf(n - 1) for n in range(1, N + 1)]
    else:
        base = [to_mpf(v) for v in toll.values[:N]]
    return [mpmath.mpf(0)] + [scale * b for b in base]


def double_toll_values(toll: TollSpec, N: int) -> np.ndarray:
    _check_custom_length(toll, N)
    n = np.arange(N + 1, dtype=np.float64)
    if toll.kind == "power":
        b = np.power(n, float(toll.alpha))
    elif toll.kind == "log":
        b = np.zeros(N + 1)
        b[1:] = np.log(n[1:])
    elif toll.kind == "path-length":
        b = n - 1
    else:
        b = np.array([0.0] + [float(v) for v in toll.values[:N]])
    b = b * float(toll.scale)
    b[0] = 0.0
    return b
