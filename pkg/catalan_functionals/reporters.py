"""Output for every result type: pandas frames, CSV, JSON and rich tables.

Numbers are rendered as strings: rationals as ``p/q`` (integers bare),
everything else with ``output.digits`` significant digits.
"""

from __future__ import annotations

import json
import sys
from functools import lru_cache
from importlib import resources
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
import pandas as pd
from jsonschema import Draft202012Validator
from rich.console import Console
from rich.table import Table

from .config import setting
from .errors import ArgumentError
from .numeric import as_fraction, format_number, make_field
from .tolls import parse_toll
from .types import (Centering, CenteredMomentSeq, ExperimentReport, LimitLaw, MomentEstimate, MomentTable,
                    ResidualReport, SeriesConstant, ShapeLimit)


def fmt(x: Any) -> str:
    return format_number(x, int(setting("output.digits")))


def _opt(x: Any) -> Optional[str]:
    return None if x is None else fmt(x)


@lru_cache(maxsize=None)
def _validator(name: str) -> Draft202012Validator:
    text = resources.files("catalan_functionals").joinpath("schemas", name).read_text(encoding="utf-8")
    schema = json.loads(text)
    Draft202012Validator.check_schema(schema)
    return Draft202012Validator(schema)


def validate_document(document: Dict[str, Any], schema: str) -> None:
    """Raise ArgumentError listing every violation of ``schema``."""
    errors = sorted(_validator(schema).iter_errors(document), key=lambda e: list(e.absolute_path))
    if errors:
        where = "; ".join(f"{'/'.join(str(p) for p in e.absolute_path) or '<root>'}: {e.message}"
                          for e in errors[:5])
        raise ArgumentError(f"document does not match {schema}: {where}")


# ---- frames ---------------------------------------------------------------

def table_frame(table: MomentTable) -> pd.DataFrame:
    """Long format: one (n, k, value) row per entry, n-major."""
    rows = [(n, k, fmt(v)) for n, row in enumerate(table.values) for k, v in enumerate(row)]
    return pd.DataFrame(rows, columns=["n", "k", "value"])


def limit_frame(law: LimitLaw) -> pd.DataFrame:
    return pd.DataFrame({
        "k": list(range(1, law.K + 1)),
        "C_k": [fmt(v) for v in law.C],
        "EY^k": [fmt(v) for v in law.moments],
        "E(Y-EY)^k": [fmt(v) for v in law.central_moments],
    })


def mk_frame(seq: CenteredMomentSeq) -> pd.DataFrame:
    return pd.DataFrame({"k": list(range(seq.K + 1)), "m_k": [fmt(v) for v in seq.m]})


def shape_frame(shape: ShapeLimit) -> pd.DataFrame:
    return pd.DataFrame({"k": list(range(1, len(shape.moments) + 1)), "EW^k": [fmt(v) for v in shape.moments]})


def curve_frame(rows: Iterable[Tuple[Any, Any]], column: str) -> pd.DataFrame:
    return pd.DataFrame([(fmt(a), fmt(v)) for a, v in rows], columns=["alpha", column])


def constant_frame(constant: SeriesConstant) -> pd.DataFrame:
    return pd.DataFrame([{
        "name": constant.name,
        "toll": constant.toll or "",
        "value": fmt(constant.value),
        "bound": fmt(constant.bound),
        "cutoff": constant.cutoff,
        "terms": constant.terms,
    }])


def residual_frame(report: ResidualReport) -> pd.DataFrame:
    return pd.DataFrame([(fmt(p.z), fmt(p.residual), fmt(p.ratio)) for p in report.points],
                        columns=["z", "residual", "ratio"])


def histogram_frame(report: ExperimentReport) -> pd.DataFrame:
    return pd.DataFrame(report.histogram, columns=["bin_left", "bin_right", "count"])


# ---- emitters -------------------------------------------------------------

def to_csv(frame: pd.DataFrame, *, path: Optional[str] = None) -> str:
    text = frame.to_csv(index=False, lineterminator="\n")
    if path is not None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(text)
    return text


def to_json(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2)


def frame_document(frame: pd.DataFrame, **meta: Any) -> Dict[str, Any]:
    return {**meta, "rows": frame.to_dict(orient="records")}


def to_human(frame: pd.DataFrame, *, title: str, summary: Sequence[str] = (), stream=None) -> None:
    c = Console(file=stream or sys.stdout, highlight=False)
    c.rule(f"[bold]{title}")
    for line in summary:
        c.print(line)
    t = Table(show_header=True)
    for col in frame.columns:
        t.add_column(str(col))
    for row in frame.itertuples(index=False):
        t.add_row(*("" if v is None else str(v) for v in row))
    c.print(t)


# ---- moment tables --------------------------------------------------------

def table_document(table: MomentTable) -> Dict[str, Any]:
    return {
        "toll": table.toll.label,
        "N": table.N,
        "K": table.K,
        "field": table.field,
        "prec": table.prec,
        "centering": {
            "kind": table.centering.kind,
            "c0": fmt(table.centering.c0),
            "profile": table.centering.profile,
        },
        "values": [[fmt(v) for v in row] for row in table.values],
    }


def table_to_json(table: MomentTable) -> str:
    document = table_document(table)
    validate_document(document, "moment_table.schema.json")
    return to_json(document)


def table_from_json(text: str) -> MomentTable:
    """Read a table written by :func:`table_to_json`; weights are recomputed."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ArgumentError(f"not a JSON document: {e}") from e
    validate_document(document, "moment_table.schema.json")
    N, K = document["N"], document["K"]
    rows = document["values"]
    if len(rows) != N + 1 or any(len(row) != K + 1 for row in rows):
        raise ArgumentError(f"values is not an {N + 1} x {K + 1} array")
    tag, prec = document["field"], document["prec"]
    field = make_field(tag, prec)
    toll = parse_toll(document["toll"], field=tag, prec=prec or 128)

    with field.context():
        def read(s: str) -> Any:
            if tag == "rational":
                return as_fraction(s)
            return field.scalar(field.convert(float(s) if field.prec <= 53 else mpmath.mpf(s)))

        values = tuple(tuple(read(s) for s in row) for row in rows)
        c = document["centering"]
        centering = Centering(c["kind"], read(c["c0"]) if c["kind"] == "linear" else 0, c["profile"])
        weights = field.to_tuple(field.weights(N))
    return MomentTable(toll, N, K, centering, tag, prec, values, weights)


# ---- experiment reports ---------------------------------------------------

def _estimate_rows(estimates: Sequence[MomentEstimate]) -> List[Dict[str, Any]]:
    return [{"k": m.k, "empirical": fmt(m.empirical), "se": fmt(m.se), "exact": _opt(m.exact),
             "target": _opt(m.target), "z": _opt(m.z_score)} for m in estimates]


def experiment_document(report: ExperimentReport) -> Dict[str, Any]:
    spec = report.spec
    return {
        "spec": {
            "toll": spec.toll.label,
            "n": spec.n,
            "samples": spec.samples,
            "seed": spec.seed,
            "workers": spec.workers,
            "standardization": spec.standardization,
            "K": spec.K,
        },
        "mean": fmt(report.mean),
        "variance": fmt(report.variance),
        "raw": _estimate_rows(report.raw),
        "standardized": _estimate_rows(report.standardized),
        "normalization": report.normalization,
        "histogram": [{"bin_left": lo, "bin_right": hi, "count": n} for lo, hi, n in report.histogram],
        "notes": list(report.notes),
        "counts": report.counts(),
    }


def experiment_to_json(report: ExperimentReport) -> str:
    document = experiment_document(report)
    validate_document(document, "experiment_report.schema.json")
    return to_json(document)


def experiment_human(report: ExperimentReport, *, stream=None) -> None:
    c = Console(file=stream or sys.stdout, highlight=False)
    spec = report.spec
    counts = report.counts()
    c.rule("[bold]Monte Carlo experiment")
    c.print(f"Toll: {spec.toll.label} • n = {spec.n} • S = {spec.samples} • seed {spec.seed} • "
            f"workers {spec.workers}")
    c.print(f"mean {fmt(report.mean)} • variance {fmt(report.variance)} • "
            f"[bold]{counts['within_4se']}/{counts['checked']}[/] raw moments within 4 SE")
    for title, rows in (("Raw moments", report.raw),
                        (f"Standardized moments {report.normalization or ''}".rstrip(), report.standardized)):
        if not rows:
            continue
        t = Table(title=title, show_header=True)
        for col in ("k", "empirical", "se", "exact", "target", "z"):
            t.add_column(col)
        for m in rows:
            t.add_row(str(m.k), fmt(m.empirical), fmt(m.se), _opt(m.exact) or "-", _opt(m.target) or "-",
                      _opt(m.z_score) or "-")
        c.print(t)
    for note in report.notes:
        c.print(f"[yellow]note:[/] {note}")


def verdict(report: ResidualReport) -> str:
    return "PASS" if report.passed else "FAIL"


def residual_summary(report: ResidualReport) -> List[str]:
    return [f"remainder exponent {fmt(report.remainder_exponent)} • slope {report.slope:.4f} • "
            f"[bold]{verdict(report)}[/]"]

