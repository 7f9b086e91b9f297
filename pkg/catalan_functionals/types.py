from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple

import mpmath

from .errors import ArgumentError
from .numeric import to_mpf

TollKind = Literal["power", "log", "path-length", "custom"]
FieldTag = Literal["rational", "float"]
CenteringKind = Literal["none", "linear", "profile"]
Standardization = Literal["limit", "empirical"]


@dataclass(frozen=True)
class TollSpec:
    kind: TollKind
    alpha: Optional[Fraction] = None          # power tolls only
    values: Tuple[Any, ...] = ()              # custom tolls: b_1..b_N
    scale: Fraction = Fraction(1)
    field: FieldTag = "float"
    prec: int = 128

    def __post_init__(self):
        if self.kind == "power":
            if self.alpha is None or self.alpha <= 0:
                raise ArgumentError(f"power toll needs alpha > 0, got {self.alpha}")
        elif self.alpha is not None:
            raise ArgumentError(f"{self.kind} toll takes no exponent")
        if self.kind == "custom" and not self.values:
            raise ArgumentError("custom toll needs at least one value")
        if self.field not in ("rational", "float"):
            raise ArgumentError(f"unknown field {self.field!r}")

    @property
    def label(self) -> str:
        if self.kind == "power":
            base = f"pow:{self.alpha}"
        elif self.kind == "custom":
            base = "custom:" + ",".join(str(v) for v in self.values)
        else:
            base = self.kind
        return base if self.scale == 1 else f"{base}*{self.scale}"

    @property
    def is_rational(self) -> bool:
        """True when every b_n is rational, so exact tables are possible."""
        if self.kind == "power":
            return self.alpha.denominator == 1
        if self.kind == "path-length":
            return True
        if self.kind == "custom":
            return all(isinstance(v, (int, Fraction)) for v in self.values)
        return False


@dataclass(frozen=True)
class Centering:
    kind: CenteringKind = "none"
    c0: Any = 0
    profile: Optional[str] = None             # name of an explicit profile

    @property
    def label(self) -> str:
        if self.kind == "linear":
            return f"linear:{self.c0}"
        if self.kind == "profile":
            return f"profile:{self.profile}"
        return "none"


@dataclass(frozen=True)
class MomentTable:
    toll: TollSpec
    N: int
    K: int
    centering: Centering
    field: FieldTag
    prec: Optional[int]
    values: Tuple[Tuple[Any, ...], ...]       # values[n][k], n = 0..N, k = 0..K
    weights: Tuple[Any, ...]                  # beta_n / 4^n

    def value(self, n: int, k: int) -> Any:
        return self.values[n][k]

    def column(self, k: int) -> List[Any]:
        if not 0 <= k <= self.K:
            raise ArgumentError(f"order {k} outside 0..{self.K}")
        return [row[k] for row in self.values]


@dataclass(frozen=True)
class LimitLaw:
    alpha: Any                                # Fraction, or "shape"
    C: Tuple[Any, ...]                        # C_1..C_K
    moments: Tuple[Any, ...]                  # E Y^1..E Y^K
    sigma2: Any
    central_moments: Tuple[Any, ...]          # E(Y-EY)^1..E(Y-EY)^K

    @property
    def K(self) -> int:
        return len(self.moments)


@dataclass(frozen=True)
class ShapeLimit:
    sigma2: Any
    moments: Tuple[Any, ...]                  # E W^1..E W^K
    c2k0: Tuple[Any, ...]                     # C_{2,0}, C_{4,0}, ...
    recurrence_deviation: Any


@dataclass(frozen=True)
class ScaledMoment:
    k: int
    value: Any
    target: Any
    deviation: Any


@dataclass(frozen=True)
class ScaledLimitReport:
    alpha: Any
    regime: Literal["small", "large"]
    rows: Tuple[ScaledMoment, ...]


@dataclass(frozen=True)
class ExpansionTerm:
    exponent: Any                             # the term is coefficient * (1-z)^exponent * L(z)^log_power
    log_power: int
    coefficient: Any = None
    symbol: Optional[str] = None              # named constant resolved later

    @property
    def resolved(self) -> bool:
        return self.coefficient is not None


@dataclass(frozen=True)
class SingularExpansion:
    terms: Tuple[ExpansionTerm, ...]
    remainder_exponent: Any
    has_constant: bool = False

    def __post_init__(self):
        keys = [(float(t.exponent), -t.log_power) for t in self.terms]
        if keys != sorted(keys):
            raise ArgumentError("expansion terms must ascend in exponent, log power descending on ties")
        for t in self.terms:
            if t.log_power < 0:
                raise ArgumentError("log powers are nonnegative")
            if float(t.exponent) >= float(self.remainder_exponent):
                raise ArgumentError(
                    f"term exponent {t.exponent} is not below the remainder exponent {self.remainder_exponent}")

    @property
    def symbols(self) -> List[str]:
        return [t.symbol for t in self.terms if not t.resolved]

    def resolve(self, constants: Mapping[str, Any]) -> "SingularExpansion":
        terms = []
        for t in self.terms:
            if t.resolved:
                terms.append(t)
                continue
            if t.symbol not in constants:
                raise ArgumentError(f"constant {t.symbol} not supplied")
            terms.append(ExpansionTerm(t.exponent, t.log_power, constants[t.symbol], t.symbol))
        return SingularExpansion(tuple(terms), self.remainder_exponent, self.has_constant)

    def evaluate(self, z) -> mpmath.mpf:
        if self.symbols:
            raise ArgumentError(f"unresolved constants {self.symbols}")
        u = 1 - to_mpf(z)
        big_l = mpmath.log(1 / u)
        return mpmath.fsum(to_mpf(t.coefficient) * u ** to_mpf(t.exponent) * big_l ** t.log_power
                           for t in self.terms)


@dataclass(frozen=True)
class PolylogId:
    alpha: Fraction
    r: int = 0

    def __post_init__(self):
        if self.r < 0:
            raise ArgumentError(f"log power r must be >= 0, got {self.r}")


@dataclass(frozen=True)
class ResidualPoint:
    z: Any
    residual: Any
    ratio: Any


@dataclass(frozen=True)
class ResidualReport:
    points: Tuple[ResidualPoint, ...]
    remainder_exponent: Any
    slope: float
    passed: bool


@dataclass(frozen=True)
class QuadratureSpec:
    method: Literal["double-exponential"] = "double-exponential"
    tol: float = 1e-12
    max_levels: int = 12

    def __post_init__(self):
        if self.method != "double-exponential":
            raise ArgumentError(f"unknown quadrature method {self.method!r}")
        if not self.tol > 0:
            raise ArgumentError("quadrature tolerance must be positive")
        if not 1 <= self.max_levels <= 20:
            raise ArgumentError(f"max_levels {self.max_levels} outside 1..20")


@dataclass(frozen=True)
class QuadratureResult:
    value: Any
    error: Any
    levels: int
    history: Tuple[Any, ...]                  # error estimate per level, from level 1


@dataclass(frozen=True)
class CenteredMomentSeq:
    alpha: Any                                # Fraction, or "half"
    m: Tuple[Any, ...]                        # m_0..m_K

    @property
    def K(self) -> int:
        return len(self.m) - 1


@dataclass(frozen=True)
class SeriesConstant:
    name: Literal["C0", "D0", "D1", "Kconst"]
    toll: Optional[str]
    value: Any
    bound: Any
    cutoff: int
    terms: int


@dataclass(frozen=True)
class ExperimentSpec:
    toll: TollSpec
    n: int
    samples: int
    seed: int
    workers: int = 1
    standardization: Standardization = "limit"
    K: int = 4

    def __post_init__(self):
        if self.n < 1:
            raise ArgumentError(f"tree size must be >= 1, got {self.n}")
        if self.samples < 1:
            raise ArgumentError(f"sample count must be >= 1, got {self.samples}")
        if self.workers < 1:
            raise ArgumentError(f"worker count must be >= 1, got {self.workers}")
        if not 0 <= self.seed < 2 ** 64:
            raise ArgumentError("seed must be a 64-bit unsigned integer")
        if self.K < 1:
            raise ArgumentError("moment order must be >= 1")
        if self.standardization not in ("limit", "empirical"):
            raise ArgumentError(f"unknown standardization {self.standardization!r}")


@dataclass
class MomentEstimate:
    k: int
    empirical: float
    se: float
    exact: Optional[float] = None
    target: Optional[float] = None

    @property
    def z_score(self) -> Optional[float]:
        if self.exact is None or self.se == 0:
            return None
        return (self.empirical - self.exact) / self.se


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    mean: float
    variance: float
    raw: List[MomentEstimate] = dataclass_field(default_factory=list)
    standardized: List[MomentEstimate] = dataclass_field(default_factory=list)
    normalization: Optional[str] = None
    histogram: List[Tuple[float, float, int]] = dataclass_field(default_factory=list)
    notes: List[str] = dataclass_field(default_factory=list)

    def counts(self) -> Dict[str, int]:
        inside = sum(1 for m in self.raw if m.z_score is not None and abs(m.z_score) <= 4)
        checked = sum(1 for m in self.raw if m.z_score is not None)
        return {"checked": checked, "within_4se": inside}
