"""Monte Carlo moments of X_n over uniform random trees.

Samples are drawn in blocks of ``montecarlo.block_size`` trees. Block b
always uses the Philox stream keyed by the master seed with counter
b * 2^192, whichever worker runs it, and blocks are concatenated in block
order, so a report depends on the seed and nothing else.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .config import setting
from .errors import CapError
from .exact_moments import half_profile, raw_moments
from .numeric import make_field
from .tolls import double_toll_values
from .trees import sample_sizes
from .types import ExperimentReport, ExperimentSpec, MomentEstimate, TollSpec

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Stream of one block; distinct blocks never share Philox counters."""
    return np.random.Generator(np.random.Philox(key=seed, counter=block << 192))


def _run_block(task: Tuple[int, int, int, int, np.ndarray]) -> np.ndarray:
    seed, block, count, n, tolls = task
    rng = block_rng(seed, block)
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = tolls[sample_sizes(n, rng)].sum()
    return out


def draw_samples(toll: TollSpec, n: int, samples: int, seed: int, workers: int = 1) -> np.ndarray:
    """X_n for ``samples`` independent uniform trees, in block order."""
    size = int(setting("montecarlo.block_size"))
    tolls = double_toll_values(toll, n)
    tasks = [(seed, b, min(size, samples - b * size), n, tolls) for b in range(math.ceil(samples / size))]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_run_block, tasks))
    else:
        blocks = [_run_block(t) for t in tasks]
    logger.debug("drew %d samples of n=%d in %d blocks", samples, n, len(tasks))
    return np.concatenate(blocks)


def _estimates(x: np.ndarray, K: int) -> List[Tuple[float, float]]:
    S = len(x)
    out = []
    for k in range(1, K + 1):
        p = x ** k
        mean = math.fsum(p) / S
        se = float(np.std(p, ddof=1)) / math.sqrt(S) if S > 1 else 0.0
        out.append((mean, se))
    return out


def _transform(raw: Sequence[float], shift: float, scale: float, K: int) -> List[float]:
    """Moments of (X - shift)/scale from E X^0..E X^K."""
    return [math.fsum(math.comb(k, i) * raw[i] * (-shift) ** (k - i) for i in range(k + 1)) / scale ** k
            for k in range(1, K + 1)]


@dataclass(frozen=True)
class Normalization:
    """(X - shift(n)) / scale(n) with limiting moments of order 1..K."""

    label: str
    shift: float
    scale: float
    targets: Optional[List[float]]
    standardized_targets: Optional[List[float]]


def _gaussian(K: int, variance: float) -> List[float]:
    return [0.0 if k % 2 else float(mpmath.fac2(k - 1)) * variance ** (k // 2) for k in range(1, K + 1)]


def _standardize_targets(central: Sequence[float], K: int) -> List[float]:
    sd = math.sqrt(central[1])
    return [central[k - 1] / sd ** k for k in range(1, K + 1)]


def limit_normalization(toll: TollSpec, n: int, K: int) -> Optional[Normalization]:
    """Centering and scaling under which X_n/c converges, for the unscaled toll."""
    from .integrals import mk_sequence_half
    from .limit_law import central_limit_moments, limit_moments
    from .series_constants import c0_constant, d1_constant

    base = TollSpec(toll.kind, toll.alpha, toll.values)
    kk = max(K, 2)
    if toll.kind == "path-length":
        raw = [float(v) for v in limit_moments(1, kk)]
        central = [float(v) for v in central_limit_moments(1, kk)]
        return Normalization("(X + n)/n^(3/2)", -float(n), n ** 1.5, raw[:K], _standardize_targets(central, K))
    if toll.kind == "log":
        c0 = float(c0_constant(base).value)
        s2 = 8 * (1 - math.log(2))
        shift = c0 * (n + 1) - 2 * math.sqrt(math.pi) * math.sqrt(n)
        scale = math.sqrt(n * math.log(n)) if n > 1 else 1.0
        return Normalization("(X - C0(n+1) + 2 sqrt(pi n))/sqrt(n log n)", shift, scale,
                             _gaussian(K, s2), _gaussian(K, 1.0))
    if toll.kind != "power":
        return None
    alpha = toll.alpha
    if alpha == HALF:
        m = [float(v) for v in mk_sequence_half(kk).m]
        shift = float(half_profile(d1_constant().value)(n))
        return Normalization("(X - (n+1)log(n+1)/sqrt(pi) - D1(n+1))/n", shift, float(n), m[1:K + 1],
                             _standardize_targets(m[1:], K))
    a_prime = float(alpha) + 0.5
    raw = [float(v) for v in limit_moments(alpha, kk)]
    central = [float(v) for v in central_limit_moments(alpha, kk)]
    if alpha < HALF:
        c0 = float(c0_constant(base).value)
        return Normalization("(X - C0(n+1))/n^(alpha+1/2)", c0 * (n + 1), n ** a_prime, raw[:K],
                             _standardize_targets(central, K))
    return Normalization("X/n^(alpha+1/2)", 0.0, n ** a_prime, raw[:K], _standardize_targets(central, K))


def _exact_raw(toll: TollSpec, n: int, K: int, notes: List[str]) -> Optional[List[float]]:
    limit = int(setting("montecarlo.exact_max_n"))
    if n > limit:
        notes.append(f"exact moments skipped: n = {n} exceeds montecarlo.exact_max_n = {limit}")
        return None
    table = raw_moments(toll, n, K, make_field("float", 53))
    return [float(v) for v in table.values[n]]


def _histogram(z: np.ndarray) -> List[Tuple[float, float, int]]:
    bins = int(setting("montecarlo.histogram_bins"))
    lo, hi = (float(v) for v in setting("montecarlo.histogram_range"))
    counts, edges = np.histogram(z, bins=bins, range=(lo, hi))
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)]


def _estimate_list(x: np.ndarray, K: int, exact: Optional[Sequence[float]],
                   targets: Optional[Sequence[float]]) -> List[MomentEstimate]:
    return [MomentEstimate(k, mean, se,
                           None if exact is None else float(exact[k - 1]),
                           None if targets is None else float(targets[k - 1]))
            for k, (mean, se) in enumerate(_estimates(x, K), start=1)]


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    max_k = int(setting("montecarlo.max_k"))
    if spec.K > max_k:
        raise CapError(f"moment order {spec.K} exceeds montecarlo.max_k = {max_k}")
    K, n = spec.K, spec.n
    notes: List[str] = []
    x = draw_samples(spec.toll, n, spec.samples, spec.seed, spec.workers)
    S = len(x)
    mean = math.fsum(x) / S
    variance = math.fsum((x - mean) ** 2) / (S - 1) if S > 1 else 0.0

    exact_raw = _exact_raw(spec.toll, n, K, notes)
    raw = _estimate_list(x, K, exact_raw[1:] if exact_raw else None, None)
    report = ExperimentReport(spec, mean, variance, raw, notes=notes)

    sd = math.sqrt(variance)
    if sd == 0:
        notes.append("sample variance is zero; standardized moments and histogram omitted")
        return report
    z_emp = (x - mean) / sd
    report.histogram = _histogram(z_emp)

    c = float(spec.toll.scale)
    norm = limit_normalization(spec.toll, n, K) if spec.toll.kind != "custom" else None
    if norm is None:
        notes.append(f"no limit law for toll {spec.toll.label}; standardized by sample mean and deviation")
    if spec.standardization == "limit" and norm is not None:
        y = (x / c - norm.shift) / norm.scale
        exact = None
        if exact_raw is not None:
            unscaled = [v / c ** k for k, v in enumerate(exact_raw)]
            exact = _transform(unscaled, norm.shift, norm.scale, K)
        report.standardized = _estimate_list(y, K, exact, norm.targets)
        report.normalization = norm.label
    else:
        exact = None
        if exact_raw is not None:
            ex_mean = exact_raw[1]
            central = _transform(exact_raw, ex_mean, 1.0, K)
            if central[1] > 0:
                exact = [v / central[1] ** ((k + 1) / 2) for k, v in enumerate(central)]
        targets = norm.standardized_targets if norm is not None else None
        if targets is not None and c < 0:
            targets = [t * (-1) ** k for k, t in enumerate(targets, start=1)]
        report.standardized = _estimate_list(z_emp, K, exact, targets)
        report.normalization = "(X - mean)/sd"
    logger.info("experiment %s n=%d S=%d: mean %.6g variance %.6g", spec.toll.label, n, S, mean, variance)
    return report
